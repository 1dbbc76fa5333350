#include <benchmark/benchmark.h>

#include "gifs/analytic.hpp"
#include "gifs/learner.hpp"

namespace {

using namespace gifs;

const Dataset& sphere_dataset() {
  static const Dataset ds = [] {
    SamplerConfig cfg;
    cfg.pairs_per_shape = 4096;
    return generate_pairs(AnalyticShapeSpec::sphere_shell({}, 0.4), cfg, "sphere");
  }();
  return ds;
}

// Default model: grids {8, 16, 32} x 16 channels, five 256-wide layers.
void BM_TrainStep(benchmark::State& state) {
  const ModelConfig mc;
  const ModelParams params = init_params<float>(mc, RngSeed{1});
  TrainConfig tc;
  tc.pairs_per_step = static_cast<std::size_t>(state.range(0));
  const std::span<const TrainingPair> batch(sphere_dataset().records.data(), tc.pairs_per_step);
  ModelParams grad;
  for (auto _ : state) benchmark::DoNotOptimize(loss_batch_gradient(params, batch, tc, grad));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_TrainStep)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_LearnedFlagBatch(benchmark::State& state) {
  const LearnedField field(init_params<float>(ModelConfig{}, RngSeed{2}));
  std::vector<PointPair> pairs;
  for (const TrainingPair& r : sphere_dataset().records) pairs.push_back({r.first(), r.second()});
  std::vector<double> out(pairs.size());
  for (auto _ : state) {
    field.flag_batch(pairs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * pairs.size()));
}
BENCHMARK(BM_LearnedFlagBatch)->Unit(benchmark::kMillisecond);

}  // namespace
