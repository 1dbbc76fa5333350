#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "gifs/mesh.hpp"
#include "gifs/sampling.hpp"

namespace gifs {

inline constexpr std::size_t kDefaultMetricSamples = 100000;
inline constexpr double kFscoreTight = 0.005;
inline constexpr double kFscoreLoose = 0.01;

enum class ChamferNorm {
  Squared,  // 0.5 * (mean_pred d(p, gt)^2 + mean_gt d(q, pred)^2)
  L2,       // same with unsquared distances
};

/// Symmetric Chamfer distance over nearest neighbours in the other set.
double chamfer(std::span<const Vec3> predicted, std::span<const Vec3> ground_truth,
               ChamferNorm norm = ChamferNorm::Squared);

/// F1 score in percent; a point counts when its nearest neighbour in the
/// other set lies within `threshold`.
double fscore(std::span<const Vec3> predicted, std::span<const Vec3> ground_truth, double threshold);

struct MetricOptions {
  double tight_threshold = kFscoreTight;
  double loose_threshold = kFscoreLoose;
  ChamferNorm norm = ChamferNorm::Squared;
};

void validate(const MetricOptions& opts);

struct MetricsReport {
  double chamfer = 0.0;  // raw units
  double fscore_0005 = 0.0;  // at options.tight_threshold
  double fscore_001 = 0.0;   // at options.loose_threshold
  MetricOptions options;
  std::size_t samples = 0;
  RngSeed seed{0};

  double chamfer_e4() const { return chamfer * 1e4; }
};

MetricsReport evaluate_points(std::span<const Vec3> predicted, std::span<const Vec3> ground_truth, RngSeed seed = {},
                              const MetricOptions& opts = {});

/// Samples `samples` points on each surface (same seed for both) and reports
/// both metrics.
MetricsReport evaluate_meshes(const TriangleMesh& predicted, const TriangleMesh& ground_truth,
                              std::size_t samples = kDefaultMetricSamples, RngSeed seed = {},
                              const MetricOptions& opts = {});

std::string to_json(const MetricsReport& report);

}  // namespace gifs
