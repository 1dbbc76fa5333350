#include "gifs/mesh_oracle.hpp"

namespace gifs {

MeshOracleField::MeshOracleField(TriangleMesh mesh) : mesh_(std::move(mesh)), bvh_(mesh_) {}

double MeshOracleField::flag(const Point3& p1, const Point3& p2) const {
  return ground_truth_flag(bvh_, mesh_, p1, p2);
}

double MeshOracleField::udf(const Point3& p) const { return ground_truth_udf(bvh_, mesh_, p); }

}  // namespace gifs
