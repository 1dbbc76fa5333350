#include <algorithm>
#include <array>
#include <cassert>
#include <vector>

#include "gifs/extractor.hpp"

namespace gifs {

namespace {

struct CubeFace {
  std::array<int, 4> corners;  // cyclic, corners[0] is the minimum corner
  Vec3 normal;                 // outward
};

constexpr std::array<CubeFace, 6> kFaces{{
    {{0, 1, 2, 3}, {0, 0, -1}},
    {{4, 5, 6, 7}, {0, 0, 1}},
    {{0, 1, 5, 4}, {0, -1, 0}},
    {{3, 2, 6, 7}, {0, 1, 0}},
    {{0, 3, 7, 4}, {-1, 0, 0}},
    {{1, 2, 6, 5}, {1, 0, 0}},
}};

int edge_between(int a, int b) {
  for (int e = 0; e < 12; ++e) {
    const auto& ed = kCubeEdges[static_cast<std::size_t>(e)];
    if ((ed[0] == a && ed[1] == b) || (ed[0] == b && ed[1] == a)) return e;
  }
  return -1;
}

Vec3 corner_pos(int c) {
  const auto& p = kCubeCorners[static_cast<std::size_t>(c)];
  return {static_cast<double>(p[0]), static_cast<double>(p[1]), static_cast<double>(p[2])};
}

Vec3 edge_mid(int e) {
  const auto& ed = kCubeEdges[static_cast<std::size_t>(e)];
  return (corner_pos(ed[0]) + corner_pos(ed[1])) * 0.5;
}

std::vector<std::array<int, 3>> build_config(std::uint8_t labels) {
  auto label = [labels](int c) { return (labels >> c) & 1; };
  std::array<int, 12> next;
  next.fill(-1);

  auto add_segment = [&](const CubeFace& face, int ea, int eb) {
    const auto& ed = kCubeEdges[static_cast<std::size_t>(ea)];
    const Vec3 inside = corner_pos(label(ed[0]) == 1 ? ed[0] : ed[1]);
    const Vec3 p = edge_mid(ea);
    const Vec3 q = edge_mid(eb);
    // Keep class 1 on the left when the face is seen from outside.
    if (dot(cross(q - p, inside - p), face.normal) < 0.0) std::swap(ea, eb);
    assert(next[static_cast<std::size_t>(ea)] == -1);
    next[static_cast<std::size_t>(ea)] = eb;
  };

  for (const CubeFace& face : kFaces) {
    std::array<int, 4> edges;
    std::vector<int> crossing;
    for (int s = 0; s < 4; ++s) {
      const int a = face.corners[static_cast<std::size_t>(s)];
      const int b = face.corners[static_cast<std::size_t>((s + 1) % 4)];
      edges[static_cast<std::size_t>(s)] = edge_between(a, b);
      if (label(a) != label(b)) crossing.push_back(edges[static_cast<std::size_t>(s)]);
    }
    if (crossing.size() == 2) {
      add_segment(face, crossing[0], crossing[1]);
    } else if (crossing.size() == 4) {
      // Cut off corners[0] (edges 3,0) and corners[2] (edges 1,2).
      add_segment(face, edges[3], edges[0]);
      add_segment(face, edges[1], edges[2]);
    }
  }

  std::vector<std::array<int, 3>> triangles;
  std::array<bool, 12> seen{};
  for (int start = 0; start < 12; ++start) {
    if (next[static_cast<std::size_t>(start)] < 0 || seen[static_cast<std::size_t>(start)]) continue;
    std::vector<int> cycle;
    for (int e = start; !seen[static_cast<std::size_t>(e)]; e = next[static_cast<std::size_t>(e)]) {
      seen[static_cast<std::size_t>(e)] = true;
      cycle.push_back(e);
    }
    // The traced boundary winds around class 1; reverse it so triangle
    // normals point towards class 0.
    for (std::size_t t = 1; t + 1 < cycle.size(); ++t) triangles.push_back({cycle[0], cycle[t + 1], cycle[t]});
  }
  return triangles;
}

struct Table {
  std::array<std::vector<std::array<int, 3>>, 256> entries;

  Table() {
    for (int c = 0; c < 256; ++c) entries[static_cast<std::size_t>(c)] = build_config(static_cast<std::uint8_t>(c));
  }
};

}  // namespace

std::span<const std::array<int, 3>> marching_cubes_triangles(std::uint8_t labels) {
  static const Table table;
  return table.entries[labels];
}

}  // namespace gifs
