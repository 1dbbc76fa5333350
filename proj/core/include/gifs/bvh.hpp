#pragma once

#include <cstdint>
#include <vector>

#include "gifs/geometry.hpp"
#include "gifs/mesh.hpp"

namespace gifs {

/// Flattened bounding volume hierarchy over the faces of a TriangleMesh.
/// Built once, immutable afterwards; all queries are const and thread safe.
class Bvh {
 public:
  struct Node {
    Aabb box;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t first = 0;  // leaf: range into face_order()
    std::uint32_t count = 0;  // zero for inner nodes
    bool is_leaf() const { return count != 0; }
  };

  static constexpr std::uint32_t kMaxLeafSize = 4;

  /// Median split on the longest centroid axis. Throws EmptyMesh.
  explicit Bvh(const TriangleMesh& mesh);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& face_order() const { return order_; }
  const Aabb& root_box() const { return nodes_.front().box; }
  std::size_t height() const;

  /// Any face touched by the closed segment (see segment_intersects_triangle).
  bool segment_intersects(const TriangleMesh& mesh, const Segment& seg) const;

  struct Nearest {
    double squared_distance;
    std::uint32_t face;
    Vec3 point;
  };
  Nearest closest_point(const TriangleMesh& mesh, const Vec3& p) const;
  double distance(const TriangleMesh& mesh, const Vec3& p) const;

 private:
  std::uint32_t build(const TriangleMesh& mesh, const std::vector<Vec3>& centroids,
                      std::uint32_t first, std::uint32_t count);

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

/// 1 iff the closed segment p1-p2 meets the surface; symmetric.
int ground_truth_flag(const Bvh& bvh, const TriangleMesh& mesh, const Point3& p1, const Point3& p2);
/// Exact distance from `p` to the closest point on the surface.
double ground_truth_udf(const Bvh& bvh, const TriangleMesh& mesh, const Point3& p);

bool naive_segment_intersects(const TriangleMesh& mesh, const Segment& seg);
double naive_distance(const TriangleMesh& mesh, const Vec3& p);

}  // namespace gifs
