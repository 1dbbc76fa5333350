#pragma once

#include "gifs/bvh.hpp"
#include "gifs/field.hpp"

namespace gifs {

/// Exact PairField over a triangle mesh: flags and distances come straight
/// from the BVH ground-truth kernels.
class MeshOracleField final : public PairField {
 public:
  explicit MeshOracleField(TriangleMesh mesh);

  double flag(const Point3& p1, const Point3& p2) const override;
  double udf(const Point3& p) const override;

  const TriangleMesh& mesh() const { return mesh_; }
  const Bvh& bvh() const { return bvh_; }

 private:
  TriangleMesh mesh_;
  Bvh bvh_;
};

inline MeshOracleField mesh_oracle_field(TriangleMesh mesh) { return MeshOracleField(std::move(mesh)); }

}  // namespace gifs
