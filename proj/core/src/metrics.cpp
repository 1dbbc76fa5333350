#include "gifs/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "json.hpp"

#include "gifs/error.hpp"
#include "gifs/kdtree.hpp"
#include "gifs/parallel.hpp"

namespace gifs {

namespace {

/// Squared distance from every query to its nearest point in `targets`.
std::vector<double> nearest_squared(std::span<const Vec3> queries, std::span<const Vec3> targets) {
  const PointKdTree tree(targets);
  std::vector<double> out(queries.size());
  parallel_for_chunks(queries.size(), 2048, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = tree.nearest_squared_distance(queries[i]);
  });
  return out;
}

void require_points(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw EmptyPointSet("metric needs two non-empty point sets");
}

double mean(const std::vector<double>& v, ChamferNorm norm) {
  double sum = 0.0;
  for (double x : v) sum += norm == ChamferNorm::Squared ? x : std::sqrt(x);
  return sum / static_cast<double>(v.size());
}

std::string threshold_key(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fscore_%g", t);
  return buf;
}

double fscore_from(const std::vector<double>& pred_to_gt, const std::vector<double>& gt_to_pred, double threshold) {
  const double t2 = threshold * threshold;
  auto fraction = [t2](const std::vector<double>& d) {
    std::size_t hits = 0;
    for (double x : d) hits += x <= t2;
    return static_cast<double>(hits) / static_cast<double>(d.size());
  };
  const double p = fraction(pred_to_gt);
  const double r = fraction(gt_to_pred);
  return p + r > 0.0 ? 200.0 * p * r / (p + r) : 0.0;
}

}  // namespace

double chamfer(std::span<const Vec3> predicted, std::span<const Vec3> ground_truth, ChamferNorm norm) {
  require_points(predicted, ground_truth);
  return 0.5 * (mean(nearest_squared(predicted, ground_truth), norm) +
                mean(nearest_squared(ground_truth, predicted), norm));
}

double fscore(std::span<const Vec3> predicted, std::span<const Vec3> ground_truth, double threshold) {
  require_points(predicted, ground_truth);
  if (!(threshold > 0.0)) throw InvalidArgument("F-score threshold must be positive");
  return fscore_from(nearest_squared(predicted, ground_truth), nearest_squared(ground_truth, predicted), threshold);
}

void validate(const MetricOptions& opts) {
  if (!(opts.tight_threshold > 0.0) || !(opts.loose_threshold > 0.0))
    throw InvalidArgument("F-score thresholds must be positive");
}

MetricsReport evaluate_points(std::span<const Vec3> predicted, std::span<const Vec3> ground_truth, RngSeed seed,
                              const MetricOptions& opts) {
  validate(opts);
  require_points(predicted, ground_truth);
  const auto pg = nearest_squared(predicted, ground_truth);
  const auto gp = nearest_squared(ground_truth, predicted);
  MetricsReport r;
  r.chamfer = 0.5 * (mean(pg, opts.norm) + mean(gp, opts.norm));
  r.fscore_0005 = fscore_from(pg, gp, opts.tight_threshold);
  r.fscore_001 = fscore_from(pg, gp, opts.loose_threshold);
  r.options = opts;
  r.samples = predicted.size();
  r.seed = seed;
  return r;
}

MetricsReport evaluate_meshes(const TriangleMesh& predicted, const TriangleMesh& ground_truth, std::size_t samples,
                              RngSeed seed, const MetricOptions& opts) {
  validate(opts);
  const auto pred_pts = sample_surface(predicted, samples, seed);
  const auto gt_pts = sample_surface(ground_truth, samples, seed);
  return evaluate_points(pred_pts, gt_pts, seed, opts);
}

std::string to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["chamfer"] = report.chamfer;
  j["chamfer_e4"] = report.chamfer_e4();
  j["chamfer_norm"] = report.options.norm == ChamferNorm::Squared ? "squared" : "l2";
  j[threshold_key(report.options.tight_threshold)] = report.fscore_0005;
  j[threshold_key(report.options.loose_threshold)] = report.fscore_001;
  j["samples"] = report.samples;
  j["seed"] = report.seed.value;
  return j.dump();
}

}  // namespace gifs
