#include <benchmark/benchmark.h>

#include "gifs/analytic.hpp"
#include "gifs/extractor.hpp"

namespace {

using namespace gifs;

constexpr Vec3 kCenter{0.0013, 0.0021, 0.0034};

void BM_SolveAssignment(benchmark::State& state) {
  Rng rng = make_rng(RngSeed{1});
  std::vector<AssignmentProblem> problems(256);
  for (auto& p : problems)
    for (double& f : p.flags) f = uniform01(rng);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(problems[i++ & 255]).labels);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_SolveAssignment);

void BM_LocateCubes(benchmark::State& state) {
  const AnalyticField field(AnalyticShapeSpec::sphere_shell(kCenter, 0.4));
  ExtractionConfig cfg;
  cfg.initial_res = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(locate_cubes(field, cfg).size());
}
BENCHMARK(BM_LocateCubes)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

// Full pipeline at 8 * res0 final resolution.
void BM_ExtractSphere(benchmark::State& state) {
  const AnalyticField field(AnalyticShapeSpec::sphere_shell(kCenter, 0.4));
  ExtractionConfig cfg;
  cfg.initial_res = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(extract(field, cfg).faces.size());
}
BENCHMARK(BM_ExtractSphere)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
