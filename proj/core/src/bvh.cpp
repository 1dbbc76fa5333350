#include "gifs/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "gifs/error.hpp"

namespace gifs {
namespace {

// Boxes are padded beyond the intersection tolerance so slab-test rounding
// never prunes a face the exact predicate would accept.
constexpr double kBoxPad = 4.0 * kGeomEpsilon;

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh) {
  if (mesh.empty()) throw EmptyMesh("cannot build a BVH over an empty mesh");
  validate(mesh);
  const auto n = static_cast<std::uint32_t>(mesh.faces.size());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  std::vector<Vec3> centroids(n);
  for (std::uint32_t f = 0; f < n; ++f)
    centroids[f] = (mesh.corner(f, 0) + mesh.corner(f, 1) + mesh.corner(f, 2)) / 3.0;
  nodes_.reserve(2 * (n / kMaxLeafSize + 1));
  build(mesh, centroids, 0, n);
}

std::uint32_t Bvh::build(const TriangleMesh& mesh, const std::vector<Vec3>& centroids,
                         std::uint32_t first, std::uint32_t count) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb centroid_box;
  for (std::uint32_t i = first; i < first + count; ++i) {
    box.extend(face_bounds(mesh, order_[i]));
    centroid_box.extend(centroids[order_[i]]);
  }
  nodes_[index].box = box;
  if (count <= kMaxLeafSize) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }

  const int axis = centroid_box.longest_axis();
  const std::uint32_t half = count / 2;
  auto begin = order_.begin() + first;
  std::nth_element(begin, begin + half, begin + count, [&](std::uint32_t a, std::uint32_t b) {
    const double ca = centroids[a][axis];
    const double cb = centroids[b][axis];
    return ca < cb || (ca == cb && a < b);
  });
  const std::uint32_t left = build(mesh, centroids, first, half);
  const std::uint32_t right = build(mesh, centroids, first + half, count - half);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

std::size_t Bvh::height() const {
  std::size_t best = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0u, 1u}};
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    best = std::max(best, depth);
    if (!nodes_[node].is_leaf()) {
      stack.emplace_back(nodes_[node].left, depth + 1);
      stack.emplace_back(nodes_[node].right, depth + 1);
    }
  }
  return best;
}

bool Bvh::segment_intersects(const TriangleMesh& mesh, const Segment& seg) const {
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!segment_overlaps_box(seg, node.box, kBoxPad)) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const auto f = order_[i];
        if (segment_intersects_triangle(seg, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2)))
          return true;
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return false;
}

Bvh::Nearest Bvh::closest_point(const TriangleMesh& mesh, const Vec3& p) const {
  Nearest best{std::numeric_limits<double>::infinity(), 0, {}};
  std::pair<double, std::uint32_t> stack[64];
  int top = 0;
  stack[top++] = {nodes_[0].box.squared_distance_to(p), 0};
  while (top > 0) {
    const auto [bound, index] = stack[--top];
    if (bound > best.squared_distance) continue;
    const Node& node = nodes_[index];
    if (node.is_leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const auto f = order_[i];
        const Vec3 q = closest_point_on_triangle(p, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2));
        const double d2 = squared_distance(p, q);
        if (d2 < best.squared_distance || (d2 == best.squared_distance && f < best.face))
          best = {d2, f, q};
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squared_distance_to(p);
    const double dr = nodes_[node.right].box.squared_distance_to(p);
    // Push the farther child first so the nearer one is visited next.
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

double Bvh::distance(const TriangleMesh& mesh, const Vec3& p) const {
  return std::sqrt(closest_point(mesh, p).squared_distance);
}

int ground_truth_flag(const Bvh& bvh, const TriangleMesh& mesh, const Point3& p1, const Point3& p2) {
  // Canonical endpoint order makes the result bitwise symmetric.
  const bool swap = std::tie(p2.x, p2.y, p2.z) < std::tie(p1.x, p1.y, p1.z);
  const Segment seg = swap ? Segment{p2, p1} : Segment{p1, p2};
  return bvh.segment_intersects(mesh, seg) ? 1 : 0;
}

double ground_truth_udf(const Bvh& bvh, const TriangleMesh& mesh, const Point3& p) {
  return bvh.distance(mesh, p);
}

bool naive_segment_intersects(const TriangleMesh& mesh, const Segment& seg) {
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (segment_intersects_triangle(seg, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2)))
      return true;
  }
  return false;
}

double naive_distance(const TriangleMesh& mesh, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    best = std::min(best, point_triangle_squared_distance(p, mesh.corner(f, 0), mesh.corner(f, 1),
                                                          mesh.corner(f, 2)));
  return std::sqrt(best);
}

}  // namespace gifs
