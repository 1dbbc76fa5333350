#include "gifs_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "gifs/datagen.hpp"
#include "gifs/error.hpp"
#include "gifs/extractor.hpp"
#include "gifs/learner.hpp"
#include "gifs/mesh_io.hpp"
#include "gifs/mesh_oracle.hpp"
#include "gifs/metrics.hpp"
#include "gifs/parallel.hpp"

namespace gifs::cli {

namespace {

using nlohmann::json;

struct GlobalOptions {
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string log_level = "info";
};

struct DemoOptions {
  std::string shape;
  std::string out;
  int res0 = 20;
  int subdiv = 3;
  int refine_iters = 30;
};

struct GenDataOptions {
  std::string mesh;
  std::string shape;
  std::string spec;
  std::size_t pairs = 50000;
  std::vector<double> sigmas{0.005, 0.01, 0.03};
  double grid_frac = 0.10;
  std::string out;
};

struct TrainOptions {
  std::string data;
  std::size_t epochs = 1;
  double lr = 1e-4;
  double delta = 0.1;
  double lambda = 10.0;
  std::size_t batch = 512;
  std::string loss = "l1";
  std::vector<int> grid_res{8, 16, 32};
  int channels = 16;
  int width = 256;
  std::string out;
};

struct ExtractOptions {
  std::string field;
  int res0 = 20;
  int subdiv = 3;
  double tau = 2.0;
  int refine_iters = 30;
  double refine_lr = 2e-4;
  std::string out;
};

struct EvalOptions {
  std::string pred;
  std::string gt;
  std::size_t samples = kDefaultMetricSamples;
  std::vector<double> thresholds{kFscoreTight, kFscoreLoose};
  std::string chamfer = "squared";
  std::string out;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool has_extension(const std::string& path, std::string_view ext) {
  std::string e = std::filesystem::path(path).extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e == ext;
}

std::optional<std::string> strip_prefix(const std::string& value, std::string_view prefix) {
  if (value.rfind(prefix, 0) != 0) return std::nullopt;
  return value.substr(prefix.size());
}

/// A field plus the map from field coordinates back to output coordinates.
struct LoadedField {
  std::unique_ptr<PairField> field;
  std::optional<Normalization> to_output;
};

LoadedField load_field(const std::string& descriptor) {
  LoadedField loaded;
  if (auto path = strip_prefix(descriptor, "mesh:")) {
    NormalizedMesh norm = normalize_mesh(read_mesh(*path));
    loaded.to_output = norm.transform;
    loaded.field = std::make_unique<MeshOracleField>(std::move(norm.mesh));
  } else if (auto model = strip_prefix(descriptor, "model:")) {
    loaded.field = std::make_unique<LearnedField>(read_model(*model));
  } else if (auto spec = strip_prefix(descriptor, "analytic:")) {
    loaded.field = std::make_unique<AnalyticField>(read_shape_spec(*spec));
  } else {
    throw UsageError("--field must be mesh:<path>, model:<path> or analytic:<spec.json>");
  }
  return loaded;
}

ExtractionConfig extraction_config(int res0, int subdiv, int refine_iters, std::uint64_t seed) {
  ExtractionConfig cfg;
  cfg.initial_res = res0;
  cfg.subdivisions = subdiv;
  cfg.refine_iters = refine_iters;
  cfg.seed = RngSeed{seed};
  return cfg;
}

void write_json_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << text << '\n';
  if (!f) throw IoError("failed writing " + path);
}

void cmd_demo(const DemoOptions& o, const GlobalOptions& g, spdlog::logger& log, std::ostream& out) {
  const AnalyticShapeSpec spec = demo_shape(o.shape);
  if (has_extension(o.out, ".json")) {
    write_shape_spec(o.out, spec);
    out << json{{"shape", o.shape}, {"out", o.out}}.dump() << '\n';
    return;
  }
  const auto start = Clock::now();
  const AnalyticField field(spec);
  const TriangleMesh mesh = extract(field, extraction_config(o.res0, o.subdiv, o.refine_iters, g.seed));
  log.info("extracted {} vertices, {} faces in {:.2f}s", mesh.vertices.size(), mesh.faces.size(), seconds_since(start));
  write_mesh(o.out, mesh);
  out << json{{"shape", o.shape}, {"vertices", mesh.vertices.size()}, {"faces", mesh.faces.size()}, {"out", o.out}}.dump()
      << '\n';
}

void cmd_gen_data(const GenDataOptions& o, const GlobalOptions& g, spdlog::logger& log, std::ostream& out) {
  const int sources = !o.mesh.empty() + !o.shape.empty() + !o.spec.empty();
  if (sources != 1) throw UsageError("gen-data needs exactly one of --mesh, --shape, --spec");
  SamplerConfig cfg;
  cfg.sigmas = o.sigmas;
  cfg.grid_fraction = o.grid_frac;
  cfg.pairs_per_shape = o.pairs;
  cfg.seed = RngSeed{g.seed};
  const auto start = Clock::now();
  Dataset ds;
  if (!o.mesh.empty()) {
    const NormalizedMesh norm = normalize_mesh(read_mesh(o.mesh));
    ds = generate_pairs(norm.mesh, cfg, std::filesystem::path(o.mesh).stem().string());
    ds.header.normalization = norm.transform;
  } else if (!o.shape.empty())
    ds = generate_pairs(demo_shape(o.shape), cfg, o.shape);
  else
    ds = generate_pairs(read_shape_spec(o.spec), cfg, std::filesystem::path(o.spec).stem().string());
  log.info("generated {} pairs ({} grid) in {:.2f}s", ds.records.size(), ds.header.grid_pairs, seconds_since(start));
  write_dataset(o.out, ds);
  std::size_t crossing = 0;
  for (const auto& r : ds.records) crossing += r.flag;
  out << json{{"records", ds.records.size()}, {"grid_pairs", ds.header.grid_pairs}, {"flag_rate",
              static_cast<double>(crossing) / static_cast<double>(ds.records.size())}, {"out", o.out}}
             .dump()
      << '\n';
}

void cmd_train(const TrainOptions& o, const GlobalOptions& g, spdlog::logger& log, std::ostream& out) {
  const Dataset ds = read_dataset(o.data);
  TrainConfig tcfg;
  tcfg.epochs = o.epochs;
  tcfg.learning_rate = o.lr;
  tcfg.delta = o.delta;
  tcfg.lambda = o.lambda;
  tcfg.pairs_per_step = o.batch;
  tcfg.seed = RngSeed{g.seed};
  tcfg.flag_loss = o.loss == "bce" ? FlagLoss::BinaryCrossEntropy : FlagLoss::L1;
  ModelConfig mcfg;
  mcfg.grids.resolutions = o.grid_res;
  mcfg.grids.channels = o.channels;
  mcfg.decoder.hidden_width = o.width;
  const auto start = Clock::now();
  const TrainResult result = train(ds, tcfg, mcfg, [&](std::size_t epoch, double loss) {
    log.info("epoch {} loss {:.6f} ({:.1f}s)", epoch + 1, loss, seconds_since(start));
  });
  write_model(o.out, result.params);
  out << json{{"epochs", o.epochs}, {"epoch_loss", result.epoch_loss}, {"parameters", result.params.parameter_count()},
              {"seconds", seconds_since(start)}, {"out", o.out}}
             .dump()
      << '\n';
}

void cmd_extract(const ExtractOptions& o, const GlobalOptions& g, spdlog::logger& log, std::ostream& out) {
  ExtractionConfig cfg = extraction_config(o.res0, o.subdiv, o.refine_iters, g.seed);
  cfg.tau = o.tau;
  cfg.refine_lr = o.refine_lr;
  validate(cfg);
  const LoadedField loaded = load_field(o.field);
  const auto start = Clock::now();
  ExtractionResult result = extract_detailed(*loaded.field, cfg);
  log.info("located {} cubes, {} faces in {:.2f}s", result.cubes.size(), result.mesh.faces.size(), seconds_since(start));
  TriangleMesh mesh = loaded.to_output ? invert_transform(result.mesh, *loaded.to_output) : std::move(result.mesh);
  write_mesh(o.out, mesh);
  out << json{{"cubes", result.cubes.size()}, {"vertices", mesh.vertices.size()}, {"faces", mesh.faces.size()},
              {"seconds", seconds_since(start)}, {"out", o.out}}
             .dump()
      << '\n';
}

void cmd_eval(const EvalOptions& o, const GlobalOptions& g, std::ostream& out) {
  const RngSeed seed{g.seed};
  if (o.thresholds.size() != 2) throw UsageError("--thresholds takes two values");
  MetricOptions opts;
  opts.tight_threshold = o.thresholds[0];
  opts.loose_threshold = o.thresholds[1];
  opts.norm = o.chamfer == "l2" ? ChamferNorm::L2 : ChamferNorm::Squared;
  validate(opts);
  MetricsReport report;
  const TriangleMesh pred = read_mesh(o.pred);
  if (auto spec = strip_prefix(o.gt, "analytic:")) {
    const auto pred_pts = sample_surface(pred, o.samples, seed);
    const auto gt_pts = sample_surface(read_shape_spec(*spec), o.samples, seed);
    report = evaluate_points(pred_pts, gt_pts, seed, opts);
  } else {
    report = evaluate_meshes(pred, read_mesh(o.gt), o.samples, seed, opts);
  }
  const std::string text = to_json(report);
  if (!o.out.empty()) write_json_file(o.out, text);
  out << text << '\n';
}

void print_error(std::ostream& err, std::string_view kind, const std::string& message,
                 const std::string& usage = {}) {
  json j{{"error", kind}, {"message", message}};
  if (!usage.empty()) j["usage"] = usage;
  err << j.dump() << '\n';
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err, const std::string& flag_level) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("gifs", std::move(sink));
  logger->set_pattern("[%H:%M:%S.%e] [%l] %v");
  std::string level = flag_level;
  if (const char* env = std::getenv("GIFS_LOG"); env && *env) level = env;
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off")
    throw UsageError("unknown log level '" + level + "'");
  logger->set_level(parsed);
  return logger;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GIFS: pairwise-flag implicit shapes (data generation, training, extraction, evaluation)", "gifs"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|critical|off; GIFS_LOG overrides")
      ->capture_default_str();

  DemoOptions demo;
  auto* demo_cmd = app.add_subcommand("demo-shape", "Write a demo shape as a spec (.json) or extracted mesh");
  demo_cmd->add_option("--shape", demo.shape, "Shape name")->required()->check(CLI::IsMember(demo_shape_names()));
  demo_cmd->add_option("--out", demo.out, "Output .json, .obj or .ply")->required();
  demo_cmd->add_option("--res0", demo.res0, "Initial grid resolution")->capture_default_str();
  demo_cmd->add_option("--subdiv", demo.subdiv, "Subdivision stages")->capture_default_str();
  demo_cmd->add_option("--refine-iters", demo.refine_iters, "Refinement iterations")->capture_default_str();

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Sample training pairs with ground-truth flags and distances");
  gen_cmd->add_option("--mesh", gen.mesh, "Input mesh (.obj or .ply); normalized to the unit cube");
  gen_cmd->add_option("--shape", gen.shape, "Demo shape name")->check(CLI::IsMember(demo_shape_names()));
  gen_cmd->add_option("--spec", gen.spec, "Analytic shape spec (.json)");
  gen_cmd->add_option("--pairs", gen.pairs, "Pairs per shape")->capture_default_str();
  gen_cmd->add_option("--sigmas", gen.sigmas, "Displacement standard deviations")
      ->delimiter(',')
      ->capture_default_str();
  gen_cmd->add_option("--grid-frac", gen.grid_frac, "Fraction of uniform free-space pairs")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output dataset")->required();

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Fit feature grids and decoders to one dataset");
  train_cmd->add_option("--data", tr.data, "Dataset file")->required();
  train_cmd->add_option("--epochs", tr.epochs, "Epochs")->capture_default_str();
  train_cmd->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--delta", tr.delta, "UDF truncation")->capture_default_str();
  train_cmd->add_option("--lambda", tr.lambda, "UDF loss weight")->capture_default_str();
  train_cmd->add_option("--batch", tr.batch, "Pairs per step")->capture_default_str();
  train_cmd->add_option("--loss", tr.loss, "Flag loss")->check(CLI::IsMember({"l1", "bce"}))->capture_default_str();
  train_cmd->add_option("--grid-res", tr.grid_res, "Feature grid resolutions")->delimiter(',')->capture_default_str();
  train_cmd->add_option("--channels", tr.channels, "Channels per grid level")->capture_default_str();
  train_cmd->add_option("--width", tr.width, "Decoder hidden width")->capture_default_str();
  train_cmd->add_option("--out", tr.out, "Output model")->required();

  ExtractOptions ex;
  auto* extract_cmd = app.add_subcommand("extract", "Extract a mesh from a pair field");
  extract_cmd->add_option("--field", ex.field, "mesh:<path> | model:<path> | analytic:<spec.json>")->required();
  extract_cmd->add_option("--res0", ex.res0, "Initial grid resolution")->capture_default_str();
  extract_cmd->add_option("--subdiv", ex.subdiv, "Subdivision stages")->capture_default_str();
  extract_cmd->add_option("--tau", ex.tau, "Localization threshold")->capture_default_str();
  extract_cmd->add_option("--refine-iters", ex.refine_iters, "Refinement iterations")->capture_default_str();
  extract_cmd->add_option("--refine-lr", ex.refine_lr, "Refinement learning rate")->capture_default_str();
  extract_cmd->add_option("--out", ex.out, "Output mesh (.obj or .ply)")->required();

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Chamfer distance and F-scores between two surfaces");
  eval_cmd->add_option("--pred", ev.pred, "Predicted mesh")->required();
  eval_cmd->add_option("--gt", ev.gt, "Reference mesh or analytic:<spec.json>")->required();
  eval_cmd->add_option("--samples", ev.samples, "Surface samples per shape")->capture_default_str();
  eval_cmd->add_option("--thresholds", ev.thresholds, "Tight and loose F-score thresholds")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  eval_cmd->add_option("--chamfer", ev.chamfer, "Chamfer convention")
      ->check(CLI::IsMember({"squared", "l2"}))
      ->capture_default_str();
  eval_cmd->add_option("--out", ev.out, "Also write the report to this file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    print_error(err, error_kind_name(ErrorKind::UsageError), e.what(), sub->help());
    return kExitUsage;
  }

  try {
    const auto log = make_logger(err, g.log_level);
    set_thread_count(g.threads);
    if (*demo_cmd) cmd_demo(demo, g, *log, out);
    if (*gen_cmd) cmd_gen_data(gen, g, *log, out);
    if (*train_cmd) cmd_train(tr, g, *log, out);
    if (*extract_cmd) cmd_extract(ex, g, *log, out);
    if (*eval_cmd) cmd_eval(ev, g, out);
    log->flush();
  } catch (const Error& e) {
    print_error(err, error_kind_name(e.kind()), e.what());
    return e.kind() == ErrorKind::UsageError || e.kind() == ErrorKind::InvalidArgument ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    print_error(err, "RuntimeError", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace gifs::cli
