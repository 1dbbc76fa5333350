// Acceptance suite: one PASS/FAIL line per criterion.
//
//   gifs_acceptance [--workdir DIR] [--only N,...] [--report-only]
//
// Exit status is 1 when any criterion fails, unless --report-only is given.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gifs/analytic.hpp"
#include "gifs/bvh.hpp"
#include "gifs/datagen.hpp"
#include "gifs/error.hpp"
#include "gifs/extractor.hpp"
#include "gifs/learner.hpp"
#include "gifs/mesh_io.hpp"
#include "gifs/mesh_oracle.hpp"
#include "gifs/metrics.hpp"
#include "gifs/parallel.hpp"
#include "gifs_cli/cli.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace gifs;
using gifs::testing::random_point;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[1024];
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string note) {
    pass = pass && ok;
    notes.push_back((ok ? "" : "!") + std::move(note));
  }
  void info(std::string note) { notes.push_back(std::move(note)); }
};

struct Context {
  fs::path workdir;
};

// Shapes shared by the extraction criteria; the centre is off the lattice.
constexpr Vec3 kCenter{0.0013, 0.0021, 0.0034};
constexpr double kRadius = 0.4;

AnalyticShapeSpec sphere() { return AnalyticShapeSpec::sphere_shell(kCenter, kRadius); }
AnalyticShapeSpec double_sphere() { return AnalyticShapeSpec::double_sphere(kCenter, 0.2, 0.4); }
AnalyticShapeSpec open_disc() { return AnalyticShapeSpec::open_disc(kCenter, {0, 0, 1}, 0.3); }

ExtractionConfig extraction(int res0, int subdiv, std::uint64_t seed = 0) {
  ExtractionConfig cfg;
  cfg.initial_res = res0;
  cfg.subdivisions = subdiv;
  cfg.seed = RngSeed{seed};
  return cfg;
}

double mean_sphere_distance(const TriangleMesh& mesh) {
  double sum = 0;
  for (const Vec3& v : mesh.vertices) sum += std::abs(distance(v, kCenter) - kRadius);
  return mesh.vertices.empty() ? 0.0 : sum / static_cast<double>(mesh.vertices.size());
}

double chamfer_to(const TriangleMesh& mesh, std::span<const Vec3> reference, RngSeed seed) {
  const std::vector<Vec3> pts = sample_surface(mesh, reference.size(), seed);
  return chamfer(pts, reference);
}

// ---------------------------------------------------------------------------

Verdict oracle_equivalence(const Context&) {
  Verdict v;
  const auto start = Clock::now();
  const std::vector<std::pair<std::string, TriangleMesh>> meshes{
      {"icosphere", make_icosphere({0.01, -0.02, 0.03}, 0.35, 3)},
      {"soup", gifs::testing::random_soup(500, RngSeed{1})},
      {"box", make_box({-0.3, -0.2, -0.25}, {0.3, 0.25, 0.2})},
      {"open-square", make_square(0.4, 0.013, 8)},
  };
  std::size_t queries = 0, mismatches = 0;
  for (std::size_t m = 0; m < meshes.size(); ++m) {
    const TriangleMesh& mesh = meshes[m].second;
    const Bvh bvh(mesh);
    Rng rng = make_rng(RngSeed{100 + m});
    for (int q = 0; q < 10000; ++q) {
      const Vec3 a = random_point(rng, -0.6, 0.6);
      const Vec3 b = q % 2 ? random_point(rng, -0.6, 0.6) : a + random_point(rng, -0.05, 0.05);
      mismatches += bvh.segment_intersects(mesh, {a, b}) != naive_segment_intersects(mesh, {a, b});
      const double fast = bvh.distance(mesh, a);
      const double slow = naive_distance(mesh, a);
      mismatches += std::abs(fast - slow) > 1e-12 * std::max(1.0, slow);
      queries += 2;
    }
  }
  const double t = seconds_since(start);
  v.check(mismatches == 0, format("%zu mismatches in %zu queries over %zu meshes", mismatches, queries, meshes.size()));
  v.check(t < 30.0, format("%.1fs < 30s", t));
  return v;
}

Verdict flag_definition(const Context&) {
  Verdict v;
  const TriangleMesh ico = make_icosphere({}, 0.3, 3);
  std::vector<std::unique_ptr<PairField>> fields;
  fields.push_back(std::make_unique<MeshOracleField>(ico));
  fields.push_back(std::make_unique<AnalyticField>(double_sphere()));
  fields.push_back(std::make_unique<AnalyticField>(open_disc()));
  ModelConfig mc;
  mc.grids.resolutions = {4, 8};
  mc.grids.channels = 4;
  mc.decoder.hidden_width = 16;
  mc.decoder.layers = 3;
  fields.push_back(std::make_unique<LearnedField>(init_params<float>(mc, RngSeed{2})));
  std::size_t asymmetric = 0;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    Rng rng = make_rng(RngSeed{10 + f});
    for (int q = 0; q < 10000; ++q) {
      const Vec3 a = random_point(rng, -0.5, 0.5);
      const Vec3 b = q % 2 ? random_point(rng, -0.5, 0.5) : a + random_point(rng, -0.02, 0.02);
      asymmetric += fields[f]->flag(a, b) != fields[f]->flag(b, a);
    }
  }
  v.check(asymmetric == 0, format("%zu asymmetric flags in %zu pairs", asymmetric, 10000 * fields.size()));

  // Single wall z = 0, |x|, |y| <= 0.5.
  const TriangleMesh wall = make_square(0.5, 0.0, 4);
  const Bvh bvh(wall);
  const Vec3 p1{0, 0, -0.1}, p2{0.8, 0, 0}, p3{0, 0, 0.1};
  const int b12 = ground_truth_flag(bvh, wall, p1, p2);
  const int b23 = ground_truth_flag(bvh, wall, p2, p3);
  const int b13 = ground_truth_flag(bvh, wall, p1, p3);
  v.check(b12 == b23 && b13 != b12, format("wall witness b12=%d b23=%d b13=%d", b12, b23, b13));
  return v;
}

double enumeration_cost(const std::array<std::array<double, 8>, 8>& b, int labels) {
  double cost = 0;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) {
      const bool split = ((labels >> i) & 1) != ((labels >> j) & 1);
      cost += split ? 1.0 - b[i][j] : b[i][j];
    }
  return cost;
}

AssignmentProblem to_problem(const std::array<std::array<double, 8>, 8>& b) {
  AssignmentProblem prob;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) prob.set_flag(i, j, b[i][j]);
  return prob;
}

Verdict assignment_solver(const Context&) {
  Verdict v;
  std::set<int> classes;
  std::size_t recovered = 0, enumeration_agrees = 0;
  for (int truth = 0; truth < 256; ++truth) {
    std::array<std::array<double, 8>, 8> b{};
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) b[i][j] = ((truth >> i) & 1) != ((truth >> j) & 1) ? 1.0 : 0.0;
    classes.insert(std::min(truth, 255 - truth));
    const Assignment a = solve_assignment(to_problem(b));
    recovered += (a.labels == truth || a.labels == 255 - truth) && a.cost == 0.0;
    double best = 1e9;
    for (int l = 0; l < 256; ++l) best = std::min(best, enumeration_cost(b, l));
    enumeration_agrees += best == 0.0 && enumeration_cost(b, a.labels) == best;
  }
  v.check(classes.size() == 128 && recovered == 256,
          format("%zu/256 labelings (%zu classes) recovered up to complement at cost 0", recovered, classes.size()));

  // Soft random flags: the solver's optimum equals the enumerated optimum.
  Rng rng = make_rng(RngSeed{3});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t random_agree = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::array<std::array<double, 8>, 8> b{};
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j) b[i][j] = b[j][i] = u(rng);
    const Assignment a = solve_assignment(to_problem(b));
    double best = 1e9;
    for (int l = 0; l < 256; ++l) best = std::min(best, enumeration_cost(b, l));
    random_agree += std::abs(a.cost - best) < 1e-12 && std::abs(enumeration_cost(b, a.labels) - best) < 1e-12;
  }
  v.check(enumeration_agrees == 256 && random_agree == 2000,
          format("enumeration agrees on %zu/256 exact and %zu/2000 random problems", enumeration_agrees, random_agree));

  // All corners on one side plus one spurious flag: keeping them together
  // costs 1, isolating corner 0 costs 6.
  std::array<std::array<double, 8>, 8> spurious{};
  spurious[0][6] = 1.0;
  const Assignment s1 = solve_assignment(to_problem(spurious));
  // Corner 0 cut off (labels 0xFE with corner 0 in class 0) plus a spurious
  // flag between corners 1 and 2: the true labeling costs 1.
  std::array<std::array<double, 8>, 8> cut{};
  for (int j = 1; j < 8; ++j) cut[0][j] = 1.0;
  cut[1][2] = 1.0;
  const Assignment s2 = solve_assignment(to_problem(cut));
  v.check(s1.labels == 0 && s1.cost == 1.0 && s2.labels == 0xFE && s2.cost == 1.0,
          format("spurious flag: labels %#x cost %.0f, %#x cost %.0f", s1.labels, s1.cost, s2.labels, s2.cost));
  return v;
}

Verdict coarse_to_fine(const Context&) {
  Verdict v;
  const auto start = Clock::now();
  const AnalyticField field(sphere());
  const ExtractionConfig cfg = extraction(10, 3);
  const std::vector<CubeIndex> cubes = locate_cubes(field, cfg);
  const double t = seconds_since(start);
  const std::set<CubeIndex> located(cubes.begin(), cubes.end());
  const std::uint32_t n = stage_resolution(cfg, cfg.subdivisions);
  std::size_t crossing = 0, missed = 0;
  for (std::uint32_t k = 0; k < n; ++k)
    for (std::uint32_t j = 0; j < n; ++j)
      for (std::uint32_t i = 0; i < n; ++i) {
        const Point3 lo = lattice_point(cfg, i, j, k), hi = lattice_point(cfg, i + 1, j + 1, k + 1);
        const Aabb box{lo, hi};
        double far = 0;
        for (int c = 0; c < 8; ++c) {
          const Vec3 corner{c & 1 ? hi.x : lo.x, c & 2 ? hi.y : lo.y, c & 4 ? hi.z : lo.z};
          far = std::max(far, distance(corner, kCenter));
        }
        const double near = std::sqrt(box.squared_distance_to(kCenter));
        if (near <= kRadius && kRadius <= far) {
          ++crossing;
          missed += !located.count({i, j, k});
        }
      }
  v.check(n == 80, format("final resolution %u", n));
  v.check(missed == 0 && crossing > 0,
          format("%zu of %zu intersecting cubes missed; %zu located", missed, crossing, cubes.size()));
  v.check(t < 60.0, format("%.2fs < 60s", t));
  return v;
}

Verdict topology(const Context&) {
  Verdict v;
  const ExtractionConfig cfg = extraction(10, 3);
  const MeshTopology s = analyze_topology(extract(AnalyticField(sphere()), cfg));
  v.check(s.closed_manifold() && s.euler_characteristic == 2 && s.boundary_edges == 0 && s.components == 1,
          format("sphere: chi %lld, %zu boundary, %zu components", s.euler_characteristic, s.boundary_edges,
                 s.components));
  const MeshTopology d = analyze_topology(extract(AnalyticField(double_sphere()), cfg));
  v.check(d.closed_manifold() && d.components == 2 && d.euler_characteristic == 4,
          format("double sphere: %zu components, chi %lld, %zu boundary", d.components, d.euler_characteristic,
                 d.boundary_edges));
  const MeshTopology o = analyze_topology(extract(AnalyticField(open_disc()), cfg));
  v.check(o.components == 1 && o.boundary_edges > 0 && o.nonmanifold_edges == 0,
          format("open disc: %zu components, %zu boundary edges", o.components, o.boundary_edges));
  return v;
}

Verdict geometric_accuracy(const Context&) {
  Verdict v;
  set_thread_count(1);
  const auto start = Clock::now();
  const ExtractionResult r = extract_detailed(AnalyticField(sphere()), extraction(20, 3));
  const double t = seconds_since(start);
  set_thread_count(0);
  const double pre = mean_sphere_distance(r.unrefined);
  const double post = mean_sphere_distance(r.mesh);
  const std::vector<Vec3> reference = sample_surface(sphere(), kDefaultMetricSamples, RngSeed{1});
  const double cd = chamfer_to(r.mesh, reference, RngSeed{2});
  constexpr double tol = 1.2;
  v.check(pre <= tol / 160.0, format("pre-refinement mean distance %.3e <= %.3e", pre, tol / 160.0));
  v.check(post <= tol * 1e-3, format("post-refinement %.3e <= %.1e", post, tol * 1e-3));
  v.check(cd <= tol * 2.5e-4, format("chamfer %.3e <= %.1e", cd, tol * 2.5e-4));
  v.check(t < 120.0, format("%.1fs single worker < 120s", t));
  return v;
}

Verdict resolution_monotonicity(const Context&) {
  Verdict v;
  const AnalyticField field(sphere());
  const std::vector<Vec3> reference = sample_surface(sphere(), kDefaultMetricSamples, RngSeed{1});
  std::vector<double> refined, unrefined, times, offsets;
  for (int res0 : {10, 20, 30}) {
    const auto start = Clock::now();
    const ExtractionResult r = extract_detailed(field, extraction(res0, 3));
    times.push_back(seconds_since(start));
    refined.push_back(chamfer_to(r.mesh, reference, RngSeed{2}));
    unrefined.push_back(chamfer_to(r.unrefined, reference, RngSeed{2}));
    offsets.push_back(mean_sphere_distance(r.mesh));
  }
  v.check(refined[0] > refined[1] && refined[1] >= refined[2],
          format("chamfer 80/160/240: %.4e %.4e %.4e", refined[0], refined[1], refined[2]));
  v.info(format("without refinement: %.4e %.4e %.4e", unrefined[0], unrefined[1], unrefined[2]));
  v.info(format("refined mean vertex distance: %.2e %.2e %.2e", offsets[0], offsets[1], offsets[2]));
  // Dense evaluation would grow 27x from 80^3 to 240^3.
  const double growth = times[2] / times[0];
  v.check(growth < 27.0, format("time 80->240 grew %.1fx (%.1fs -> %.1fs) < 27x", growth, times[0], times[2]));
  return v;
}

ModelConfig tiny_model() {
  ModelConfig mc;
  mc.grids.resolutions = {2};
  mc.grids.channels = 4;
  mc.decoder.hidden_width = 8;
  mc.decoder.layers = 5;
  return mc;
}

double worst_gradient_error(FlagLoss loss, double lambda, double delta, const Dataset& ds) {
  auto p = init_params<double>(tiny_model(), RngSeed{5});
  // Nonzero biases keep ReLU units off their kinks.
  for (auto* mlp : {&p.flag_mlp, &p.udf_mlp})
    for (auto& layer : *mlp) std::fill(layer.bias.begin(), layer.bias.end(), 0.01);
  TrainConfig tc;
  tc.flag_loss = loss;
  tc.lambda = lambda;
  tc.delta = delta;
  const std::span<const TrainingPair> batch(ds.records);
  ModelParamsT<double> grad;
  loss_batch_gradient(p, batch, tc, grad);
  std::vector<std::span<double>> values, grads;
  p.for_each_tensor([&](std::span<double> t) { values.push_back(t); });
  grad.for_each_tensor([&](std::span<double> t) { grads.push_back(t); });
  double worst = 0;
  for (std::size_t k = 0; k < values.size(); ++k)
    for (std::size_t i = 0; i < values[k].size(); ++i) {
      const double saved = values[k][i], h = 1e-6;
      values[k][i] = saved + h;
      const double up = loss_batch(p, batch, tc);
      values[k][i] = saved - h;
      const double down = loss_batch(p, batch, tc);
      values[k][i] = saved;
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(fd - grads[k][i]) / std::max(1e-3, std::abs(fd)));
    }
  return worst;
}

// Overfit configuration; see the README for how it was chosen.
ModelConfig overfit_model() {
  ModelConfig mc;
  mc.grids.resolutions = {8};
  mc.grids.channels = 16;
  return mc;
}

TrainConfig overfit_training() {
  TrainConfig tc;
  tc.flag_loss = FlagLoss::BinaryCrossEntropy;
  tc.learning_rate = 1e-3;
  tc.epochs = 150;
  tc.seed = RngSeed{3};
  return tc;
}

Verdict learner(const Context&) {
  Verdict v;
  SamplerConfig tiny;
  tiny.pairs_per_shape = 16;
  tiny.seed = RngSeed{1};
  const Dataset small = generate_pairs(sphere(), tiny, "sphere");
  double worst = 0;
  worst = std::max(worst, worst_gradient_error(FlagLoss::L1, 10.0, 10.0, small));
  worst = std::max(worst, worst_gradient_error(FlagLoss::L1, 10.0, 0.1, small));
  worst = std::max(worst, worst_gradient_error(FlagLoss::BinaryCrossEntropy, 10.0, 10.0, small));
  v.check(worst <= 1e-4, format("worst gradient error %.2e <= 1e-4", worst));

  SamplerConfig sc;  // 50k pairs, sigma {0.005, 0.01, 0.03}, 10% grid
  sc.seed = RngSeed{1};
  const Dataset train_set = generate_pairs(sphere(), sc, "sphere");
  SamplerConfig hc = sc;
  hc.pairs_per_shape = 10000;
  hc.seed = RngSeed{99};
  const Dataset held = generate_pairs(sphere(), hc, "sphere");

  const auto start = Clock::now();
  const TrainResult trained = train(train_set, overfit_training(), overfit_model());
  const double t = seconds_since(start);
  const LearnedField field(trained.params);

  std::size_t correct = 0, band = 0;
  double abs_err = 0;
  for (const TrainingPair& r : held.records) {
    correct += (field.flag(r.first(), r.second()) >= 0.5) == (r.flag == 1);
    for (int k = 0; k < 2; ++k) {
      const double gt = k ? r.udf2 : r.udf1;
      if (gt > 0.1) continue;
      abs_err += std::abs(field.udf(k ? r.second() : r.first()) - gt);
      ++band;
    }
  }
  const double accuracy = static_cast<double>(correct) / static_cast<double>(held.records.size());
  const double mae = abs_err / static_cast<double>(band);
  v.check(accuracy >= 0.95, format("held-out flag accuracy %.4f >= 0.95", accuracy));
  v.check(mae <= 0.01, format("held-out UDF MAE %.2e <= 0.01", mae));
  v.check(t <= 900.0, format("training %.0fs <= 900s", t));

  const std::vector<Vec3> reference = sample_surface(sphere(), kDefaultMetricSamples, RngSeed{1});
  const ExtractionConfig cfg = extraction(10, 3);
  const double exact = chamfer_to(extract(AnalyticField(sphere()), cfg), reference, RngSeed{2});
  double learned = std::numeric_limits<double>::infinity();
  try {
    learned = chamfer_to(extract(field, cfg), reference, RngSeed{2});
  } catch (const Error& e) {
    v.info(std::string("learned extraction failed: ") + e.what());
  }
  v.check(learned <= 10 * exact, format("learned-field chamfer %.3e <= 10 x exact %.3e", learned, exact));
  return v;
}

Verdict refinement_ablation(const Context&) {
  Verdict v;
  for (const auto& [name, spec] : {std::pair{"sphere", sphere()}, std::pair{"double sphere", double_sphere()}}) {
    const AnalyticField field(spec);
    const std::vector<Vec3> reference = sample_surface(spec, kDefaultMetricSamples, RngSeed{1});
    int improved = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const ExtractionResult r = extract_detailed(field, extraction(10, 2, seed));
      const double pre = chamfer_to(r.unrefined, reference, RngSeed{100 + seed});
      const double post = chamfer_to(r.mesh, reference, RngSeed{100 + seed});
      improved += post <= pre;
    }
    v.check(improved >= 9, format("%s: refinement helped in %d/10 runs", name, improved));
  }
  return v;
}

int run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.insert(args.begin(), {"--log-level", "off"});
  return cli::run(args, out, err);
}

template <typename Fn>
ErrorKind error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return static_cast<ErrorKind>(-1);
}

Verdict determinism_and_formats(const Context& ctx) {
  Verdict v;
  const fs::path dir = ctx.workdir / "determinism";
  fs::create_directories(dir);
  auto path = [&](const std::string& name) { return (dir / name).string(); };
  int failures = 0;
  for (const std::string t : {"1", "3"}) {
    const std::vector<std::string> common{"--seed", "7", "--threads", t};
    auto with = [&](std::vector<std::string> rest) {
      rest.insert(rest.begin(), common.begin(), common.end());
      return run_cli(rest);
    };
    failures += with({"gen-data", "--shape", "double-sphere", "--pairs", "20000", "--out", path("d" + t + ".bin")}) != 0;
    failures += with({"train", "--data", path("d" + t + ".bin"), "--epochs", "2", "--grid-res", "4,8", "--channels",
                      "4", "--width", "32", "--out", path("m" + t + ".bin")}) != 0;
    failures += with({"extract", "--field", "model:" + path("m" + t + ".bin"), "--res0", "10", "--subdiv", "1",
                      "--out", path("x" + t + ".obj")}) != 0;
    failures += with({"demo-shape", "--shape", "ball-on-plane", "--res0", "10", "--subdiv", "2", "--out",
                      path("b" + t + ".ply")}) != 0;
  }
  std::size_t identical = 0;
  for (const char* stem : {"d", "m", "x", "b"}) {
    const std::string ext = stem == std::string("d") || stem == std::string("m") ? ".bin"
                            : stem == std::string("x")                        ? ".obj"
                                                                              : ".ply";
    const std::string a = gifs::testing::read_bytes(dir / (stem + std::string("1") + ext));
    const std::string b = gifs::testing::read_bytes(dir / (stem + std::string("3") + ext));
    identical += !a.empty() && a == b;
  }
  v.check(failures == 0 && identical == 4,
          format("%zu/4 artefacts (dataset, model, learned mesh, demo mesh) byte-identical for 1 and 3 threads",
                 identical));

  // Format error paths.
  std::ostringstream ds_out, model_out;
  SamplerConfig sc;
  sc.pairs_per_shape = 50;
  write_dataset(ds_out, generate_pairs(sphere(), sc, "sphere"));
  ModelConfig mc;
  mc.grids.resolutions = {2};
  mc.grids.channels = 2;
  mc.decoder.hidden_width = 4;
  mc.decoder.layers = 2;
  write_model(model_out, init_params<float>(mc, RngSeed{1}));
  const std::string dataset = ds_out.str(), model = model_out.str();
  const std::size_t body = dataset.size() - 50 * kDatasetRecordBytes;

  auto read_ds = [](std::string bytes) {
    return [bytes] {
      std::istringstream in(bytes);
      read_dataset(in);
    };
  };
  auto read_md = [](std::string bytes) {
    return [bytes] {
      std::istringstream in(bytes);
      read_model(in);
    };
  };
  auto patched = [](std::string bytes, std::size_t at, const void* data, std::size_t n) {
    std::memcpy(bytes.data() + at, data, n);
    return bytes;
  };
  auto blank_header = [](std::string bytes, std::size_t at) {
    std::uint32_t len = 0;
    std::memcpy(&len, bytes.data() + at - 4, 4);
    std::fill(bytes.begin() + static_cast<long>(at), bytes.begin() + static_cast<long>(at + len), ' ');
    bytes[at] = '{';
    return bytes;
  };
  const std::uint8_t two = 2, one = 1;
  const float nan = std::nanf(""), negative = -1.0f, inf = std::numeric_limits<float>::infinity();

  struct Case {
    std::string name;
    std::function<void()> fn;
    ErrorKind expected;
  };
  const std::vector<Case> cases{
      {"dataset magic", read_ds(patched(dataset, 0, "X", 1)), ErrorKind::FormatError},
      {"dataset version", read_ds(patched(dataset, 15, "9", 1)), ErrorKind::FormatError},
      {"dataset header json", read_ds(blank_header(dataset, 20)), ErrorKind::FormatError},
      {"dataset truncated header", read_ds(dataset.substr(0, 18)), ErrorKind::TruncatedFile},
      {"dataset truncated record", read_ds(dataset.substr(0, dataset.size() - 7)), ErrorKind::TruncatedFile},
      {"dataset trailing bytes", read_ds(dataset + "x"), ErrorKind::FormatError},
      {"dataset flag", read_ds(patched(dataset, body + 32, &two, 1)), ErrorKind::CorruptRecord},
      {"dataset padding", read_ds(patched(dataset, body + 34, &one, 1)), ErrorKind::CorruptRecord},
      {"dataset nan", read_ds(patched(dataset, body + 4, &nan, 4)), ErrorKind::CorruptRecord},
      {"dataset udf sign", read_ds(patched(dataset, body + 24, &negative, 4)), ErrorKind::CorruptRecord},
      {"dataset missing file", [&] { read_dataset(dir / "missing.bin"); }, ErrorKind::FormatError},
      {"model magic", read_md(patched(model, 1, "X", 1)), ErrorKind::FormatError},
      {"model version", read_md(patched(model, 12, "9", 1)), ErrorKind::FormatError},
      {"model header json", read_md(blank_header(model, 17)), ErrorKind::FormatError},
      {"model truncated header", read_md(model.substr(0, 15)), ErrorKind::TruncatedFile},
      {"model truncated tensor", read_md(model.substr(0, model.size() - 3)), ErrorKind::TruncatedFile},
      {"model trailing bytes", read_md(model + "x"), ErrorKind::FormatError},
      {"model non-finite", read_md(patched(model, model.size() - 4, &inf, 4)), ErrorKind::CorruptRecord},
      {"model missing file", [&] { read_model(dir / "missing.bin"); }, ErrorKind::FormatError},
      {"obj bad number", [] { std::istringstream in("v 0 0 zero\n"); read_obj(in); }, ErrorKind::FormatError},
      {"obj bad index",
       [] {
         std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 7\n");
         read_obj(in);
       },
       ErrorKind::FormatError},
      {"ply magic", [] { std::istringstream in("plx\n"); read_ply(in); }, ErrorKind::FormatError},
      {"ply ascii",
       [] {
         std::istringstream in("ply\nformat ascii 1.0\nelement vertex 0\nend_header\n");
         read_ply(in);
       },
       ErrorKind::FormatError},
      {"ply truncated",
       [] {
         std::ostringstream out;
         write_ply(out, make_box({0, 0, 0}, {1, 1, 1}));
         const std::string s = out.str();
         std::istringstream in(s.substr(0, s.size() - 5));
         read_ply(in);
       },
       ErrorKind::TruncatedFile},
      {"mesh extension", [&] { read_mesh(dir / "shape.stl"); }, ErrorKind::FormatError},
      {"spec json", [] { shape_spec_from_json("{not json"); }, ErrorKind::FormatError},
      {"spec kind", [] { shape_spec_from_json(R"({"kind":"torus"})"); }, ErrorKind::FormatError},
  };
  std::vector<std::string> wrong;
  for (const Case& c : cases)
    if (error_of(c.fn) != c.expected) wrong.push_back(c.name);
  std::string wrong_list;
  for (const auto& w : wrong) wrong_list += " " + w;
  v.check(wrong.empty(), format("%zu/%zu format error paths raise the expected error%s%s", cases.size() - wrong.size(),
                                cases.size(), wrong.empty() ? "" : "; wrong:", wrong_list.c_str()));

  const int missing = run_cli({"extract", "--field", "model:" + path("missing.bin"), "--out", path("y.obj")});
  const int usage = run_cli({"extract", "--res0", "8"});
  v.check(missing == cli::kExitRuntime && usage == cli::kExitUsage,
          format("CLI exit codes: missing input %d, usage error %d", missing, usage));
  return v;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict(const Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string workdir = (fs::temp_directory_path() / "gifs_acceptance").string();
  std::vector<int> only;
  bool report_only = false;
  app.add_option("--workdir", workdir, "Scratch directory for CLI artefacts");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_flag("--report-only", report_only, "Exit 0 even when criteria fail");
  CLI11_PARSE(app, argc, argv);

  const Context ctx{workdir};
  fs::create_directories(ctx.workdir);
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", oracle_equivalence},
      {2, "flag definition", flag_definition},
      {3, "assignment solver", assignment_solver},
      {4, "coarse-to-fine completeness", coarse_to_fine},
      {5, "topology", topology},
      {6, "geometric accuracy", geometric_accuracy},
      {7, "resolution monotonicity", resolution_monotonicity},
      {8, "learner", learner},
      {9, "refinement ablation", refinement_ablation},
      {10, "determinism and formats", determinism_and_formats},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.run(ctx);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    failed += !v.pass;
    std::string notes;
    for (const auto& n : v.notes) notes += (notes.empty() ? "" : "; ") + n;
    std::printf("%s %2d %-28s %6.1fs  %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(start),
                notes.c_str());
    std::fflush(stdout);
  }
  return failed == 0 || report_only ? 0 : 1;
}
