#include "gifs/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "gifs/error.hpp"
#include "gifs/parallel.hpp"

namespace gifs {

namespace {

constexpr std::uint32_t kMaxLatticeRes = (1u << 20) - 2;

double domain_extent(const ExtractionConfig& cfg) { return cfg.domain.hi.x - cfg.domain.lo.x; }

}  // namespace

void validate(const ExtractionConfig& cfg) {
  if (cfg.initial_res < 2) throw InvalidArgument("initial_res must be at least 2");
  if (cfg.subdivisions < 0) throw InvalidArgument("subdivisions must be non-negative");
  if (!(cfg.tau > 0.0)) throw InvalidArgument("tau must be positive");
  if (!(cfg.flag_threshold > 0.0 && cfg.flag_threshold < 1.0))
    throw InvalidArgument("flag threshold must lie in (0, 1)");
  if (cfg.refine_iters < 0) throw InvalidArgument("refine_iters must be non-negative");
  if (!(cfg.refine_lr >= 0.0) || !std::isfinite(cfg.refine_lr)) throw InvalidArgument("refine_lr must be non-negative");
  const Vec3 ext = cfg.domain.extent();
  if (!is_finite(cfg.domain.lo) || !is_finite(cfg.domain.hi) || !(ext.x > 0.0) || ext.x != ext.y || ext.x != ext.z)
    throw InvalidArgument("extraction domain must be a non-empty cube");
  if (cfg.subdivisions > 20 ||
      static_cast<std::uint64_t>(cfg.initial_res) << cfg.subdivisions > static_cast<std::uint64_t>(kMaxLatticeRes))
    throw InvalidArgument("final extraction resolution is too large");
}

std::uint32_t stage_resolution(const ExtractionConfig& cfg, int stage) {
  return static_cast<std::uint32_t>(cfg.initial_res) << stage;
}

double stage_cube_size(const ExtractionConfig& cfg, int stage) {
  return domain_extent(cfg) / static_cast<double>(stage_resolution(cfg, stage));
}

double final_cube_size(const ExtractionConfig& cfg) { return stage_cube_size(cfg, cfg.subdivisions); }

Point3 lattice_point(const ExtractionConfig& cfg, std::uint32_t i, std::uint32_t j, std::uint32_t k) {
  const double ext = domain_extent(cfg);
  const auto res = static_cast<double>(stage_resolution(cfg, cfg.subdivisions));
  return {cfg.domain.lo.x + ext * i / res, cfg.domain.lo.y + ext * j / res, cfg.domain.lo.z + ext * k / res};
}

std::vector<CubeIndex> locate_cubes(const PairField& field, const ExtractionConfig& cfg) {
  validate(cfg);
  const auto res0 = static_cast<std::uint32_t>(cfg.initial_res);
  std::vector<CubeIndex> cubes;
  cubes.reserve(static_cast<std::size_t>(res0) * res0 * res0);
  for (std::uint32_t i = 0; i < res0; ++i)
    for (std::uint32_t j = 0; j < res0; ++j)
      for (std::uint32_t k = 0; k < res0; ++k) cubes.push_back({i, j, k});

  const double ext = domain_extent(cfg);
  for (int stage = 0; stage < cfg.subdivisions; ++stage) {
    const double s = stage_cube_size(cfg, stage);
    const double twice_res = 2.0 * stage_resolution(cfg, stage);
    std::vector<Point3> centers(cubes.size());
    for (std::size_t c = 0; c < cubes.size(); ++c) {
      const CubeIndex& q = cubes[c];
      centers[c] = {cfg.domain.lo.x + ext * (2.0 * q.i + 1.0) / twice_res,
                    cfg.domain.lo.y + ext * (2.0 * q.j + 1.0) / twice_res,
                    cfg.domain.lo.z + ext * (2.0 * q.k + 1.0) / twice_res};
    }
    std::vector<double> udf(cubes.size());
    field.udf_batch(centers, udf);
    std::vector<CubeIndex> next;
    for (std::size_t c = 0; c < cubes.size(); ++c) {
      if (!(udf[c] < s * cfg.tau)) continue;
      const CubeIndex& q = cubes[c];
      for (std::uint32_t child = 0; child < 8; ++child)
        next.push_back({2 * q.i + (child & 1), 2 * q.j + ((child >> 1) & 1), 2 * q.k + ((child >> 2) & 1)});
    }
    cubes = std::move(next);
  }
  std::sort(cubes.begin(), cubes.end());
  return cubes;
}

int corner_pair_index(int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j > 7 || i == j) throw InvalidArgument("invalid cube corner pair");
  // Pairs (0,1..7), (1,2..7), ... laid out row by row.
  return i * 7 - i * (i - 1) / 2 + (j - i - 1);
}

double assignment_cost(const AssignmentProblem& prob, std::uint8_t labels) {
  double cost = 0.0;
  int p = 0;
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j, ++p) {
      const double b = prob.flags[static_cast<std::size_t>(p)];
      const bool split = ((labels >> i) & 1) != ((labels >> j) & 1);
      cost += split ? 1.0 - b : b;
    }
  }
  return cost;
}

Assignment solve_assignment(const AssignmentProblem& prob) {
  Assignment best{0, assignment_cost(prob, 0)};
  // Complementary labelings cost the same; only corner-0-in-class-0 ones are
  // enumerated.
  for (int labels = 2; labels < 256; labels += 2) {
    const double cost = assignment_cost(prob, static_cast<std::uint8_t>(labels));
    if (cost < best.cost) best = {static_cast<std::uint8_t>(labels), cost};
  }
  return best;
}

namespace {

constexpr std::size_t kCubeBlock = 8192;

std::uint64_t edge_key(std::uint32_t i, std::uint32_t j, std::uint32_t k, int axis) {
  return ((((static_cast<std::uint64_t>(i) << 20) | j) << 20 | k) << 2) | static_cast<std::uint64_t>(axis);
}

}  // namespace

TriangleMesh adapted_marching_cubes(const PairField& field, std::span<const CubeIndex> cubes,
                                    const ExtractionConfig& cfg) {
  validate(cfg);
  TriangleMesh mesh;
  std::unordered_map<std::uint64_t, std::uint32_t> welded;
  std::vector<PointPair> pairs;
  std::vector<double> flags;
  std::vector<std::uint8_t> labels;

  for (std::size_t first = 0; first < cubes.size(); first += kCubeBlock) {
    const auto block = cubes.subspan(first, std::min(kCubeBlock, cubes.size() - first));
    pairs.resize(block.size() * kCornerPairs);
    for (std::size_t c = 0; c < block.size(); ++c) {
      std::array<Point3, 8> corners;
      for (int v = 0; v < 8; ++v) {
        const auto& off = kCubeCorners[static_cast<std::size_t>(v)];
        corners[static_cast<std::size_t>(v)] =
            lattice_point(cfg, block[c].i + static_cast<std::uint32_t>(off[0]),
                          block[c].j + static_cast<std::uint32_t>(off[1]), block[c].k + static_cast<std::uint32_t>(off[2]));
      }
      std::size_t p = c * kCornerPairs;
      for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b)
          pairs[p++] = {corners[static_cast<std::size_t>(a)], corners[static_cast<std::size_t>(b)]};
    }
    flags.resize(pairs.size());
    field.flag_batch(pairs, flags);

    labels.resize(block.size());
    parallel_for_chunks(block.size(), 512, [&](std::size_t begin, std::size_t end) {
      for (std::size_t c = begin; c < end; ++c) {
        AssignmentProblem prob;
        std::copy_n(flags.begin() + static_cast<std::ptrdiff_t>(c * kCornerPairs), kCornerPairs, prob.flags.begin());
        labels[c] = solve_assignment(prob).labels;
      }
    });

    for (std::size_t c = 0; c < block.size(); ++c) {
      const CubeIndex& q = block[c];
      for (const auto& tri : marching_cubes_triangles(labels[c])) {
        Face face;
        for (int t = 0; t < 3; ++t) {
          const auto& edge = kCubeEdges[static_cast<std::size_t>(tri[static_cast<std::size_t>(t)])];
          const auto& a = kCubeCorners[static_cast<std::size_t>(edge[0])];
          const auto& b = kCubeCorners[static_cast<std::size_t>(edge[1])];
          const int axis = a[0] != b[0] ? 0 : (a[1] != b[1] ? 1 : 2);
          const std::uint32_t li = q.i + static_cast<std::uint32_t>(std::min(a[0], b[0]));
          const std::uint32_t lj = q.j + static_cast<std::uint32_t>(std::min(a[1], b[1]));
          const std::uint32_t lk = q.k + static_cast<std::uint32_t>(std::min(a[2], b[2]));
          const auto [it, inserted] =
              welded.try_emplace(edge_key(li, lj, lk, axis), static_cast<std::uint32_t>(mesh.vertices.size()));
          if (inserted) {
            const Point3 lo = lattice_point(cfg, li, lj, lk);
            const Point3 hi = lattice_point(cfg, li + (axis == 0), lj + (axis == 1), lk + (axis == 2));
            mesh.vertices.push_back((lo + hi) * 0.5);
          }
          face[static_cast<std::size_t>(t)] = it->second;
        }
        mesh.faces.push_back(face);
      }
    }
  }
  return mesh;
}

TriangleMesh refine_mesh(const PairField& field, const TriangleMesh& mesh, const ExtractionConfig& cfg) {
  validate(cfg);
  TriangleMesh out = mesh;
  if (cfg.refine_iters == 0 || mesh.faces.empty()) return out;
  validate(mesh);

  constexpr double kAlpha = 0.99;
  constexpr double kEps = 1e-8;
  const double h = final_cube_size(cfg) / 8.0;
  const std::size_t nf = mesh.faces.size();
  std::vector<Vec3> square_avg(out.vertices.size(), Vec3{});
  std::vector<Vec3> grad(out.vertices.size());
  std::vector<std::array<double, 3>> weights(nf);
  std::vector<Point3> probes(nf * 6);
  std::vector<double> udf(probes.size());

  for (int it = 0; it < cfg.refine_iters; ++it) {
    Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(it));
    for (std::size_t f = 0; f < nf; ++f) {
      double u = uniform01(rng);
      double v = uniform01(rng);
      if (u + v > 1.0) {
        u = 1.0 - u;
        v = 1.0 - v;
      }
      weights[f] = {1.0 - u - v, u, v};
      const Point3 x = out.corner(f, 0) * weights[f][0] + out.corner(f, 1) * u + out.corner(f, 2) * v;
      for (int axis = 0; axis < 3; ++axis) {
        Vec3 step{};
        step[axis] = h;
        probes[f * 6 + 2 * static_cast<std::size_t>(axis)] = x + step;
        probes[f * 6 + 2 * static_cast<std::size_t>(axis) + 1] = x - step;
      }
    }
    field.udf_batch(probes, udf);

    std::fill(grad.begin(), grad.end(), Vec3{});
    for (std::size_t f = 0; f < nf; ++f) {
      Vec3 g;
      for (int axis = 0; axis < 3; ++axis)
        g[axis] = (udf[f * 6 + 2 * static_cast<std::size_t>(axis)] - udf[f * 6 + 2 * static_cast<std::size_t>(axis) + 1]) /
                  (2.0 * h);
      for (int c = 0; c < 3; ++c)
        grad[mesh.faces[f][static_cast<std::size_t>(c)]] += g * weights[f][static_cast<std::size_t>(c)];
    }

    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
      for (int axis = 0; axis < 3; ++axis) {
        const double g = grad[v][axis];
        double& sq = square_avg[v][axis];
        sq = kAlpha * sq + (1.0 - kAlpha) * g * g;
        out.vertices[v][axis] -= cfg.refine_lr * g / (std::sqrt(sq) + kEps);
      }
      if (!is_finite(out.vertices[v]))
        throw RefinementDiverged("vertex " + std::to_string(v) + " became non-finite at iteration " +
                                 std::to_string(it));
    }
  }
  return out;
}

ExtractionResult extract_detailed(const PairField& field, const ExtractionConfig& cfg) {
  ExtractionResult result;
  result.cubes = locate_cubes(field, cfg);
  result.unrefined = adapted_marching_cubes(field, result.cubes, cfg);
  result.mesh = refine_mesh(field, result.unrefined, cfg);
  return result;
}

TriangleMesh extract(const PairField& field, const ExtractionConfig& cfg) { return extract_detailed(field, cfg).mesh; }

}  // namespace gifs
