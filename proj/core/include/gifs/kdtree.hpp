#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gifs/vec3.hpp"

namespace gifs {

/// Static kd-tree over a point set for exact nearest-neighbour queries.
class PointKdTree {
 public:
  explicit PointKdTree(std::span<const Vec3> points);

  std::size_t size() const { return points_.size(); }

  /// Squared distance from `q` to the nearest stored point.
  double nearest_squared_distance(const Vec3& q) const;

 private:
  struct Node {
    Aabb box;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t first = 0;
    std::uint32_t count = 0;
  };
  std::uint32_t build(std::uint32_t first, std::uint32_t count);

  std::vector<Vec3> points_;
  std::vector<Node> nodes_;
};

}  // namespace gifs
