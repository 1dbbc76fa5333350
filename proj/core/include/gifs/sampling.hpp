#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gifs/mesh.hpp"

namespace gifs {

struct RngSeed {
  std::uint64_t value = 0;
  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

using Rng = std::mt19937_64;

/// Independent stream for sub-task `stream` of a seeded computation. The
/// stream depends only on (seed, stream), never on scheduling.
Rng make_rng(RngSeed seed, std::uint64_t stream = 0);

double uniform01(Rng& rng);

/// Area-weighted point sampler over a triangle mesh.
class SurfaceSampler {
 public:
  /// Throws EmptyMesh, or DegenerateMesh when the total area is zero.
  explicit SurfaceSampler(const TriangleMesh& mesh);

  struct Sample {
    Vec3 point;
    std::uint32_t face;
  };
  Sample sample(Rng& rng) const;

 private:
  const TriangleMesh* mesh_;
  std::vector<double> cumulative_;
};

/// Uniform barycentric point on triangle (a, b, c) from two uniforms.
Vec3 barycentric_sample(const Vec3& a, const Vec3& b, const Vec3& c, double u, double v);

std::vector<Vec3> sample_surface(const TriangleMesh& mesh, std::size_t n, RngSeed seed);

}  // namespace gifs
