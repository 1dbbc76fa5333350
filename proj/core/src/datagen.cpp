#include "gifs/datagen.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "gifs/bvh.hpp"
#include "gifs/error.hpp"
#include "gifs/parallel.hpp"

namespace gifs {

using nlohmann::json;

void validate(const SamplerConfig& cfg) {
  if (cfg.sigmas.empty()) throw InvalidArgument("sampler needs at least one sigma");
  for (double s : cfg.sigmas)
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("sigmas must be positive");
  if (!(cfg.grid_fraction >= 0.0 && cfg.grid_fraction <= 1.0))
    throw InvalidArgument("grid_fraction must lie in [0, 1]");
  if (cfg.pairs_per_shape < 1) throw InvalidArgument("pairs_per_shape must be at least 1");
}

namespace {

void store_float(const Vec3& p, float* out) {
  out[0] = static_cast<float>(p.x);
  out[1] = static_cast<float>(p.y);
  out[2] = static_cast<float>(p.z);
}

template <typename SampleBase, typename Flag, typename Udf>
Dataset generate(const SamplerConfig& cfg, const std::string& shape_id, const SampleBase& sample_base,
                 const Flag& flag_of, const Udf& udf_of) {
  validate(cfg);
  const std::size_t n = cfg.pairs_per_shape;
  Dataset ds;
  ds.records.resize(n);
  std::vector<std::uint8_t> is_grid(n, 0);
  const std::size_t shards = (n + kPairsPerShard - 1) / kPairsPerShard;

  parallel_for_chunks(shards, 1, [&](std::size_t shard_begin, std::size_t shard_end) {
    for (std::size_t shard = shard_begin; shard < shard_end; ++shard) {
      Rng rng = make_rng(cfg.seed, shard);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const std::size_t begin = shard * kPairsPerShard;
      const std::size_t end = std::min(n, begin + kPairsPerShard);
      for (std::size_t i = begin; i < end; ++i) {
        Vec3 a;
        Vec3 b;
        if (uniform01(rng) < cfg.grid_fraction) {
          is_grid[i] = 1;
          a = {uniform01(rng) - 0.5, uniform01(rng) - 0.5, uniform01(rng) - 0.5};
          b = {uniform01(rng) - 0.5, uniform01(rng) - 0.5, uniform01(rng) - 0.5};
        } else {
          const Vec3 base = sample_base(rng);
          const auto pick = std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(cfg.sigmas.size())),
                                     cfg.sigmas.size() - 1);
          const double sigma = cfg.sigmas[pick];
          a = base + Vec3{gauss(rng), gauss(rng), gauss(rng)} * sigma;
          b = base + Vec3{gauss(rng), gauss(rng), gauss(rng)} * sigma;
        }
        TrainingPair& rec = ds.records[i];
        store_float(a, rec.p1);
        store_float(b, rec.p2);
        a = rec.first();
        b = rec.second();
        rec.udf1 = static_cast<float>(udf_of(a));
        rec.udf2 = static_cast<float>(udf_of(b));
        rec.flag = static_cast<std::uint8_t>(flag_of(a, b));
      }
    }
  });

  ds.header.shape_id = shape_id;
  ds.header.sampler = cfg;
  ds.header.record_count = n;
  for (auto g : is_grid) ds.header.grid_pairs += g;
  return ds;
}

}  // namespace

Dataset generate_pairs(const TriangleMesh& mesh, const SamplerConfig& cfg, const std::string& shape_id) {
  const SurfaceSampler sampler(mesh);
  const Bvh bvh(mesh);
  return generate(
      cfg, shape_id, [&](Rng& rng) { return sampler.sample(rng).point; },
      [&](const Vec3& a, const Vec3& b) { return ground_truth_flag(bvh, mesh, a, b); },
      [&](const Vec3& p) { return ground_truth_udf(bvh, mesh, p); });
}

Dataset generate_pairs(const AnalyticShapeSpec& spec, const SamplerConfig& cfg, const std::string& shape_id) {
  const AnalyticSurfaceSampler sampler(spec);
  return generate(
      cfg, shape_id, [&](Rng& rng) { return sampler.sample(rng); },
      [&](const Vec3& a, const Vec3& b) { return analytic_flag(spec, a, b) ? 1 : 0; },
      [&](const Vec3& p) { return analytic_udf(spec, p); });
}

namespace {

constexpr char kMagic[16] = {'G', 'I', 'F', 'S', 'D', 'A', 'T', 'A', '\0', '\0', '\0', '\0', 'v', '0', '0', '1'};

json header_json(const DatasetHeader& h) {
  json j;
  j["format_version"] = h.version;
  j["shape_id"] = h.shape_id;
  j["normalization"] = {{"scale", h.normalization.scale},
                        {"offset", {h.normalization.offset.x, h.normalization.offset.y, h.normalization.offset.z}}};
  j["sampler"] = {{"sigmas", h.sampler.sigmas},
                  {"grid_fraction", h.sampler.grid_fraction},
                  {"pairs_per_shape", h.sampler.pairs_per_shape},
                  {"seed", h.sampler.seed.value}};
  j["record_count"] = h.record_count;
  j["grid_pairs"] = h.grid_pairs;
  return j;
}

DatasetHeader parse_header(const std::string& text) {
  DatasetHeader h;
  try {
    const json j = json::parse(text);
    h.version = j.at("format_version").get<std::uint32_t>();
    h.shape_id = j.at("shape_id").get<std::string>();
    const json& norm = j.at("normalization");
    h.normalization.scale = norm.at("scale").get<double>();
    const auto off = norm.at("offset").get<std::vector<double>>();
    if (off.size() != 3) throw FormatError("normalization offset must be a 3-vector");
    h.normalization.offset = {off[0], off[1], off[2]};
    const json& s = j.at("sampler");
    h.sampler.sigmas = s.at("sigmas").get<std::vector<double>>();
    h.sampler.grid_fraction = s.at("grid_fraction").get<double>();
    h.sampler.pairs_per_shape = s.at("pairs_per_shape").get<std::size_t>();
    h.sampler.seed.value = s.at("seed").get<std::uint64_t>();
    h.record_count = j.at("record_count").get<std::uint64_t>();
    h.grid_pairs = j.at("grid_pairs").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid dataset header: ") + e.what());
  }
  if (h.version != 1) throw FormatError("unsupported dataset version " + std::to_string(h.version));
  return h;
}

void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw TruncatedFile(std::string("dataset ends inside ") + what);
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& ds) {
  if (ds.header.record_count != ds.records.size())
    throw InvalidArgument("dataset header record count does not match records");
  const std::string header = header_json(ds.header).dump();
  const auto len = static_cast<std::uint32_t>(header.size());
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::vector<char> body(ds.records.size() * kDatasetRecordBytes, 0);
  char* p = body.data();
  for (const TrainingPair& r : ds.records) {
    const float values[8] = {r.p1[0], r.p1[1], r.p1[2], r.p2[0], r.p2[1], r.p2[2], r.udf1, r.udf2};
    std::memcpy(p, values, sizeof(values));
    p[32] = static_cast<char>(r.flag);
    p += kDatasetRecordBytes;
  }
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("failed writing dataset");
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_dataset(out, ds);
}

Dataset read_dataset(std::istream& in) {
  char magic[16];
  in.read(magic, sizeof(magic));
  if (static_cast<std::size_t>(in.gcount()) != sizeof(magic) || std::memcmp(magic, kMagic, 12) != 0)
    throw FormatError("not a GIFS dataset (bad magic)");
  if (std::memcmp(magic + 12, kMagic + 12, 4) != 0) throw FormatError("unsupported dataset format version");

  std::uint32_t len = 0;
  read_exact(in, reinterpret_cast<char*>(&len), sizeof(len), "header length");
  std::string header(len, '\0');
  read_exact(in, header.data(), len, "header");

  Dataset ds;
  ds.header = parse_header(header);
  std::vector<char> body(ds.header.record_count * kDatasetRecordBytes);
  read_exact(in, body.data(), body.size(), "records");
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after dataset records");

  ds.records.resize(ds.header.record_count);
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const char* p = body.data() + i * kDatasetRecordBytes;
    float values[8];
    std::memcpy(values, p, sizeof(values));
    TrainingPair& r = ds.records[i];
    std::memcpy(r.p1, values, 12);
    std::memcpy(r.p2, values + 3, 12);
    r.udf1 = values[6];
    r.udf2 = values[7];
    r.flag = static_cast<std::uint8_t>(p[32]);
    bool ok = r.flag <= 1 && p[33] == 0 && p[34] == 0 && p[35] == 0;
    for (float v : values) ok = ok && std::isfinite(v);
    ok = ok && r.udf1 >= 0.0f && r.udf2 >= 0.0f;
    if (!ok) throw CorruptRecord("record " + std::to_string(i) + " violates the record invariants");
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_dataset(in);
}

}  // namespace gifs
