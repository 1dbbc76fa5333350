#include "gifs/sampling.hpp"

#include <algorithm>

#include "gifs/error.hpp"

namespace gifs {

Rng make_rng(RngSeed seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.value), static_cast<std::uint32_t>(seed.value >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Vec3 barycentric_sample(const Vec3& a, const Vec3& b, const Vec3& c, double u, double v) {
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return a + (b - a) * u + (c - a) * v;
}

SurfaceSampler::SurfaceSampler(const TriangleMesh& mesh) : mesh_(&mesh) {
  if (mesh.empty()) throw EmptyMesh("cannot sample an empty mesh");
  cumulative_.resize(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    total += face_area(mesh, f);
    cumulative_[f] = total;
  }
  if (!(total > 0.0)) throw DegenerateMesh("mesh has zero surface area");
}

SurfaceSampler::Sample SurfaceSampler::sample(Rng& rng) const {
  const double r = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  if (it == cumulative_.end()) --it;
  const auto face = static_cast<std::uint32_t>(it - cumulative_.begin());
  const double u = uniform01(rng);
  const double v = uniform01(rng);
  return {barycentric_sample(mesh_->corner(face, 0), mesh_->corner(face, 1), mesh_->corner(face, 2), u, v),
          face};
}

std::vector<Vec3> sample_surface(const TriangleMesh& mesh, std::size_t n, RngSeed seed) {
  if (n == 0) throw InvalidArgument("sample count must be at least 1");
  const SurfaceSampler sampler(mesh);
  Rng rng = make_rng(seed);
  std::vector<Vec3> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) points.push_back(sampler.sample(rng).point);
  return points;
}

}  // namespace gifs
