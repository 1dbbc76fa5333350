#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gifs/analytic.hpp"
#include "gifs/mesh.hpp"
#include "gifs/sampling.hpp"

namespace gifs {

struct SamplerConfig {
  std::vector<double> sigmas{0.005, 0.01, 0.03};
  double grid_fraction = 0.10;
  std::size_t pairs_per_shape = 50000;
  RngSeed seed{0};

  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

void validate(const SamplerConfig& cfg);

/// One labelled pair. Coordinates are float32 so stored records are exact;
/// labels are computed from the float coordinates.
struct TrainingPair {
  float p1[3];
  float p2[3];
  float udf1;
  float udf2;
  std::uint8_t flag;

  Point3 first() const { return {p1[0], p1[1], p1[2]}; }
  Point3 second() const { return {p2[0], p2[1], p2[2]}; }

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

struct DatasetHeader {
  std::string shape_id;
  Normalization normalization;
  SamplerConfig sampler;
  std::uint64_t record_count = 0;
  std::uint64_t grid_pairs = 0;
  std::uint32_t version = 1;

  friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

struct Dataset {
  DatasetHeader header;
  std::vector<TrainingPair> records;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Pairs generated per shard; each shard draws from its own (seed, shard)
/// stream so output does not depend on the worker count.
inline constexpr std::size_t kPairsPerShard = 4096;

/// Displaced surface pairs p_i = p_S + n_i with n_i ~ N(0, sigma^2 I),
/// sigma drawn per pair from `cfg.sigmas`, plus (with probability
/// grid_fraction per pair) uniform pairs in [-0.5, 0.5]^3. Labels come
/// from the exact mesh kernels. The mesh must already be normalized.
Dataset generate_pairs(const TriangleMesh& mesh, const SamplerConfig& cfg, const std::string& shape_id = "mesh");

/// Same sampling strategy with analytic surface samples and labels.
Dataset generate_pairs(const AnalyticShapeSpec& spec, const SamplerConfig& cfg,
                       const std::string& shape_id = "analytic");

/// File layout: 16-byte magic "GIFSDATA\0\0\0\0v001", uint32 LE header
/// length, JSON header, then 36-byte little-endian records
/// (6 x f32 coordinates, 2 x f32 udf, u8 flag, 3 zero bytes).
inline constexpr std::size_t kDatasetRecordBytes = 36;

void write_dataset(std::ostream& out, const Dataset& ds);
void write_dataset(const std::filesystem::path& path, const Dataset& ds);
/// Throws FormatError (magic, version, header), TruncatedFile, CorruptRecord.
Dataset read_dataset(std::istream& in);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace gifs
