#include "gifs/mesh.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "gifs/error.hpp"

namespace gifs {

void validate(const TriangleMesh& mesh) {
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (!is_finite(mesh.vertices[v]))
      throw InvalidMesh("vertex " + std::to_string(v) + " has a non-finite coordinate");
  }
  const auto n = mesh.vertices.size();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    for (auto idx : face) {
      if (idx >= n) throw InvalidMesh("face " + std::to_string(f) + " index out of range");
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
      throw InvalidMesh("face " + std::to_string(f) + " repeats a vertex");
  }
}

Aabb bounds(const TriangleMesh& mesh) {
  Aabb box;
  for (const Face& f : mesh.faces)
    for (auto idx : f) box.extend(mesh.vertices[idx]);
  return box;
}

Aabb face_bounds(const TriangleMesh& mesh, std::size_t face) {
  Aabb box;
  for (int k = 0; k < 3; ++k) box.extend(mesh.corner(face, k));
  return box;
}

double face_area(const TriangleMesh& mesh, std::size_t face) {
  const Vec3& a = mesh.corner(face, 0);
  return 0.5 * norm(cross(mesh.corner(face, 1) - a, mesh.corner(face, 2) - a));
}

double surface_area(const TriangleMesh& mesh) {
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) total += face_area(mesh, f);
  return total;
}

NormalizedMesh normalize_mesh(const TriangleMesh& mesh) {
  if (mesh.empty()) throw EmptyMesh("cannot normalize an empty mesh");
  validate(mesh);
  const Aabb box = bounds(mesh);
  const Vec3 e = box.extent();
  const double largest = std::max({e.x, e.y, e.z});
  if (!(largest > 0.0)) throw DegenerateMesh("mesh has zero extent");

  NormalizedMesh out;
  out.transform.offset = -box.center();
  out.transform.scale = kNormalizedExtent / largest;
  out.mesh = apply_transform(mesh, out.transform);
  return out;
}

TriangleMesh apply_transform(const TriangleMesh& mesh, const Normalization& t) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = t.apply(v);
  return out;
}

TriangleMesh invert_transform(const TriangleMesh& mesh, const Normalization& t) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = t.invert(v);
  return out;
}

TriangleMesh make_icosphere(const Vec3& center, double radius, int depth) {
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0},
                             {0, -1, g}, {0, 1, g}, {0, -1, -g}, {0, 1, -g},
                             {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  for (Vec3& v : verts) v = normalized(v);
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < depth; ++level) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto [it, inserted] = midpoints.try_emplace({key.first, key.second}, 0);
      if (inserted) {
        it->second = static_cast<std::uint32_t>(verts.size());
        verts.push_back(normalized(verts[a] + verts[b]));
      }
      return it->second;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const Face& f : faces) {
      const auto ab = midpoint(f[0], f[1]);
      const auto bc = midpoint(f[1], f[2]);
      const auto ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  TriangleMesh mesh;
  mesh.faces = std::move(faces);
  mesh.vertices.reserve(verts.size());
  for (const Vec3& v : verts) mesh.vertices.push_back(center + v * radius);
  return mesh;
}

TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
  TriangleMesh mesh;
  for (int i = 0; i < 8; ++i)
    mesh.vertices.push_back({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z});
  // Outward-facing quads split into triangles.
  const std::array<std::array<std::uint32_t, 4>, 6> quads = {{{0, 2, 3, 1},
                                                              {4, 5, 7, 6},
                                                              {0, 1, 5, 4},
                                                              {2, 6, 7, 3},
                                                              {0, 4, 6, 2},
                                                              {1, 3, 7, 5}}};
  for (const auto& q : quads) {
    mesh.faces.push_back({q[0], q[1], q[2]});
    mesh.faces.push_back({q[0], q[2], q[3]});
  }
  return mesh;
}

TriangleMesh make_square(double half_size, double z, int n) {
  TriangleMesh mesh;
  const double step = 2.0 * half_size / n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) mesh.vertices.push_back({-half_size + i * step, -half_size + j * step, z});
  auto id = [n](int i, int j) { return static_cast<std::uint32_t>(j * (n + 1) + i); };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return mesh;
}

namespace {

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<std::vector<std::size_t>> connected_components(const TriangleMesh& mesh) {
  DisjointSets sets(mesh.vertices.size());
  for (const Face& f : mesh.faces) {
    sets.unite(f[0], f[1]);
    sets.unite(f[1], f[2]);
  }
  std::map<std::uint32_t, std::size_t> label;
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto root = sets.find(mesh.faces[f][0]);
    auto [it, inserted] = label.try_emplace(root, components.size());
    if (inserted) components.emplace_back();
    components[it->second].push_back(f);
  }
  return components;
}

MeshTopology analyze_topology(const TriangleMesh& mesh) {
  MeshTopology topo;
  topo.faces = mesh.faces.size();

  std::vector<std::uint64_t> edges;
  edges.reserve(mesh.faces.size() * 3);
  std::vector<bool> used(mesh.vertices.size(), false);
  for (const Face& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      used[f[k]] = true;
      const auto [a, b] = std::minmax(f[k], f[(k + 1) % 3]);
      edges.push_back((std::uint64_t{a} << 32) | b);
    }
  }
  topo.vertices = static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    ++topo.edges;
    if (j - i == 1) ++topo.boundary_edges;
    if (j - i > 2) ++topo.nonmanifold_edges;
    i = j;
  }
  topo.components = connected_components(mesh).size();
  topo.euler_characteristic = static_cast<long long>(topo.vertices) -
                              static_cast<long long>(topo.edges) +
                              static_cast<long long>(topo.faces);
  return topo;
}

}  // namespace gifs
