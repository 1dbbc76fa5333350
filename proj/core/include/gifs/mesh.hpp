#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "gifs/vec3.hpp"

namespace gifs {

using Face = std::array<std::uint32_t, 3>;

/// Indexed triangle soup.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  bool empty() const { return faces.empty(); }
  const Vec3& corner(std::size_t face, int k) const { return vertices[faces[face][k]]; }

  friend bool operator==(const TriangleMesh&, const TriangleMesh&) = default;
};

/// Throws InvalidMesh when an index is out of range, a face repeats a
/// vertex, or a coordinate is not finite.
void validate(const TriangleMesh& mesh);

Aabb bounds(const TriangleMesh& mesh);
Aabb face_bounds(const TriangleMesh& mesh, std::size_t face);
double face_area(const TriangleMesh& mesh, std::size_t face);
double surface_area(const TriangleMesh& mesh);

/// Affine map into the unit cube: normalized = (v + offset) * scale.
struct Normalization {
  double scale = 1.0;
  Vec3 offset{};

  Vec3 apply(const Vec3& v) const { return (v + offset) * scale; }
  Vec3 invert(const Vec3& v) const { return v / scale - offset; }

  friend bool operator==(const Normalization&, const Normalization&) = default;
};

struct NormalizedMesh {
  TriangleMesh mesh;
  Normalization transform;
};

/// Largest extent of a normalized mesh; leaves padding inside [-0.5, 0.5]^3.
inline constexpr double kNormalizedExtent = 0.9;

/// Centers the bounding box at the origin and scales the largest axis to
/// kNormalizedExtent. Throws EmptyMesh / DegenerateMesh.
NormalizedMesh normalize_mesh(const TriangleMesh& mesh);
TriangleMesh apply_transform(const TriangleMesh& mesh, const Normalization& t);
TriangleMesh invert_transform(const TriangleMesh& mesh, const Normalization& t);

TriangleMesh make_icosphere(const Vec3& center, double radius, int depth);
TriangleMesh make_box(const Vec3& lo, const Vec3& hi);
/// Flat square in the plane z = `z`, split into 2 * n * n triangles.
TriangleMesh make_square(double half_size, double z, int n);

struct MeshTopology {
  std::size_t vertices = 0;  // referenced by at least one face
  std::size_t edges = 0;
  std::size_t faces = 0;
  std::size_t boundary_edges = 0;
  std::size_t nonmanifold_edges = 0;
  std::size_t components = 0;
  long long euler_characteristic = 0;

  bool closed_manifold() const { return boundary_edges == 0 && nonmanifold_edges == 0; }
};

MeshTopology analyze_topology(const TriangleMesh& mesh);

/// Groups faces into components connected through shared vertices.
std::vector<std::vector<std::size_t>> connected_components(const TriangleMesh& mesh);

}  // namespace gifs
