#include <benchmark/benchmark.h>

#include <random>

#include "gifs/analytic.hpp"
#include "gifs/bvh.hpp"
#include "gifs/datagen.hpp"
#include "gifs/kdtree.hpp"
#include "gifs/metrics.hpp"

namespace {

using namespace gifs;

std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(RngSeed{seed});
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Vec3> out(n);
  for (Vec3& p : out) {
    const double x = u(rng), y = u(rng), z = u(rng);
    p = {x, y, z};
  }
  return out;
}

void BM_BvhBuild(benchmark::State& state) {
  const TriangleMesh mesh = make_icosphere({}, 0.4, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Bvh(mesh).nodes().size());
  state.counters["faces"] = static_cast<double>(mesh.faces.size());
}
BENCHMARK(BM_BvhBuild)->Arg(3)->Arg(5);

void BM_BvhSegment(benchmark::State& state) {
  const TriangleMesh mesh = make_icosphere({}, 0.4, static_cast<int>(state.range(0)));
  const Bvh bvh(mesh);
  const auto a = random_points(1024, 1), b = random_points(1024, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ground_truth_flag(bvh, mesh, a[i & 1023], b[i & 1023]));
    ++i;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_BvhSegment)->Arg(3)->Arg(5);

void BM_BvhDistance(benchmark::State& state) {
  const TriangleMesh mesh = make_icosphere({}, 0.4, static_cast<int>(state.range(0)));
  const Bvh bvh(mesh);
  const auto pts = random_points(1024, 3);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ground_truth_udf(bvh, mesh, pts[i++ & 1023]));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_BvhDistance)->Arg(3)->Arg(5);

void BM_AnalyticFlagBatch(benchmark::State& state) {
  const AnalyticField field(AnalyticShapeSpec::double_sphere({}, 0.2, 0.4));
  const auto a = random_points(4096, 4), b = random_points(4096, 5);
  std::vector<PointPair> pairs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) pairs[i] = {a[i], b[i]};
  std::vector<double> out(pairs.size());
  for (auto _ : state) {
    field.flag_batch(pairs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * pairs.size()));
}
BENCHMARK(BM_AnalyticFlagBatch);

void BM_GeneratePairs(benchmark::State& state) {
  const TriangleMesh mesh = make_icosphere({}, 0.4, 4);
  SamplerConfig cfg;
  cfg.pairs_per_shape = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_pairs(mesh, cfg).records.size());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_GeneratePairs)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Chamfer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_points(n, 6), b = random_points(n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(chamfer(a, b));
}
BENCHMARK(BM_Chamfer)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
