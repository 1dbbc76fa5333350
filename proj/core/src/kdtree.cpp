#include "gifs/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "gifs/error.hpp"

namespace gifs {
namespace {
constexpr std::uint32_t kLeafSize = 8;
}

PointKdTree::PointKdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) throw EmptyPointSet("kd-tree needs at least one point");
  nodes_.reserve(2 * (points_.size() / kLeafSize + 1));
  build(0, static_cast<std::uint32_t>(points_.size()));
}

std::uint32_t PointKdTree::build(std::uint32_t first, std::uint32_t count) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  for (std::uint32_t i = first; i < first + count; ++i) box.extend(points_[i]);
  nodes_[index].box = box;
  if (count <= kLeafSize) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  const int axis = box.longest_axis();
  const std::uint32_t half = count / 2;
  auto begin = points_.begin() + first;
  std::nth_element(begin, begin + half, begin + count,
                   [axis](const Vec3& a, const Vec3& b) { return a[axis] < b[axis]; });
  const auto left = build(first, half);
  const auto right = build(first + half, count - half);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

double PointKdTree::nearest_squared_distance(const Vec3& q) const {
  double best = std::numeric_limits<double>::infinity();
  std::pair<double, std::uint32_t> stack[96];
  int top = 0;
  stack[top++] = {nodes_[0].box.squared_distance_to(q), 0};
  while (top > 0) {
    const auto [bound, index] = stack[--top];
    if (bound >= best) continue;
    const Node& node = nodes_[index];
    if (node.count != 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i)
        best = std::min(best, squared_distance(points_[i], q));
      continue;
    }
    const double dl = nodes_[node.left].box.squared_distance_to(q);
    const double dr = nodes_[node.right].box.squared_distance_to(q);
    if (dl <= dr) {
      stack[top++] = {dr, node.right};
      stack[top++] = {dl, node.left};
    } else {
      stack[top++] = {dl, node.left};
      stack[top++] = {dr, node.right};
    }
  }
  return best;
}

}  // namespace gifs
