#include "gifs/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <Eigen/Core>

#include "json.hpp"

#include "gifs/error.hpp"
#include "gifs/parallel.hpp"

namespace gifs {

using nlohmann::json;

void validate(const ModelConfig& cfg) {
  if (cfg.grids.resolutions.empty()) throw InvalidArgument("need at least one feature grid level");
  for (int k : cfg.grids.resolutions)
    if (k < 2) throw InvalidArgument("feature grid resolution must be at least 2");
  if (cfg.grids.channels < 1) throw InvalidArgument("feature channels must be at least 1");
  if (cfg.decoder.hidden_width < 1) throw InvalidArgument("hidden width must be at least 1");
  if (cfg.decoder.layers < 1) throw InvalidArgument("decoder needs at least one layer");
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (!(cfg.lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  if (!(cfg.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (cfg.pairs_per_step < 1) throw InvalidArgument("pairs_per_step must be at least 1");
}

namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
Eigen::Map<const RowMat<T>> weight_of(const DenseLayer<T>& layer) {
  return {layer.weight.data(), layer.out, layer.in};
}
template <typename T>
Eigen::Map<const Vec<T>> bias_of(const DenseLayer<T>& layer) {
  return {layer.bias.data(), layer.out};
}

template <typename T>
T sigmoid(T a) {
  return a >= T(0) ? T(1) / (T(1) + std::exp(-a)) : std::exp(a) / (T(1) + std::exp(a));
}

template <typename T>
T softplus(T a) {
  return a > T(20) ? a : std::log1p(std::exp(a));
}

template <typename T>
T sign(T x) {
  return static_cast<T>((x > T(0)) - (x < T(0)));
}

template <typename T>
std::vector<DenseLayer<T>> make_mlp(int input, const DecoderConfig& cfg) {
  std::vector<DenseLayer<T>> layers(static_cast<std::size_t>(cfg.layers));
  for (int l = 0; l < cfg.layers; ++l) {
    auto& layer = layers[static_cast<std::size_t>(l)];
    layer.in = l == 0 ? input : cfg.hidden_width;
    layer.out = l == cfg.layers - 1 ? 1 : cfg.hidden_width;
    layer.weight.assign(static_cast<std::size_t>(layer.in) * layer.out, T(0));
    layer.bias.assign(static_cast<std::size_t>(layer.out), T(0));
  }
  return layers;
}

template <typename T>
ModelParamsT<T> zeros_like_config(const ModelConfig& cfg) {
  ModelParamsT<T> p;
  p.config = cfg;
  for (int k : cfg.grids.resolutions)
    p.grids.emplace_back(static_cast<std::size_t>(k) * k * k * cfg.grids.channels, T(0));
  p.flag_mlp = make_mlp<T>(cfg.grids.embedding_size(), cfg.decoder);
  p.udf_mlp = make_mlp<T>(cfg.grids.embedding_size(), cfg.decoder);
  return p;
}

template <typename T>
bool same_layout(const ModelParamsT<T>& a, const ModelParamsT<T>& b) {
  auto sizes = [](const ModelParamsT<T>& p) {
    std::vector<std::size_t> out;
    p.for_each_tensor([&out](std::span<const T> t) { out.push_back(t.size()); });
    for (const auto* mlp : {&p.flag_mlp, &p.udf_mlp})
      for (const auto& layer : *mlp) out.push_back(static_cast<std::size_t>(layer.in));
    return out;
  };
  return a.config.grids.channels == b.config.grids.channels && sizes(a) == sizes(b);
}

/// Trilinear stencil of one point on every level.
template <typename T>
struct Stencil {
  std::vector<std::uint32_t> index;  // point-major: [point][level][corner] -> node offset * C
  std::vector<T> weight;
};

template <typename T>
void embed_points(const ModelParamsT<T>& params, std::span<const Vec3> points, Mat<T>& z, Stencil<T>* stencil) {
  const auto& cfg = params.config.grids;
  const int levels = static_cast<int>(cfg.resolutions.size());
  const int channels = cfg.channels;
  const auto n = static_cast<Eigen::Index>(points.size());
  z.resize(cfg.embedding_size(), n);
  if (stencil) {
    stencil->index.resize(points.size() * levels * 8);
    stencil->weight.resize(points.size() * levels * 8);
  }
  for (Eigen::Index col = 0; col < n; ++col) {
    const Vec3& p = points[static_cast<std::size_t>(col)];
    T* out = z.col(col).data();
    for (int level = 0; level < levels; ++level) {
      const int k = cfg.resolutions[static_cast<std::size_t>(level)];
      int base[3];
      double frac[3];
      for (int a = 0; a < 3; ++a) {
        const double u = std::clamp((p[a] + 0.5) * (k - 1), 0.0, static_cast<double>(k - 1));
        base[a] = std::min(static_cast<int>(std::floor(u)), k - 2);
        frac[a] = u - base[a];
      }
      const T* grid = params.grids[static_cast<std::size_t>(level)].data();
      T* dst = out + level * channels;
      std::fill(dst, dst + channels, T(0));
      for (int corner = 0; corner < 8; ++corner) {
        const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
        const T w = static_cast<T>((dx ? frac[0] : 1.0 - frac[0]) * (dy ? frac[1] : 1.0 - frac[1]) *
                                   (dz ? frac[2] : 1.0 - frac[2]));
        const auto node = static_cast<std::uint32_t>(((base[2] + dz) * k + (base[1] + dy)) * k + (base[0] + dx)) *
                          static_cast<std::uint32_t>(channels);
        const T* src = grid + node;
        for (int c = 0; c < channels; ++c) dst[c] += w * src[c];
        if (stencil) {
          const std::size_t slot = (static_cast<std::size_t>(col) * levels + level) * 8 + corner;
          stencil->index[slot] = node;
          stencil->weight[slot] = w;
        }
      }
    }
  }
}

template <typename T>
void scatter_embedding_grad(const Stencil<T>& stencil, const Mat<T>& dz, int channels,
                            std::vector<Tensor<T>>& grid_grads) {
  const int levels = static_cast<int>(grid_grads.size());
  for (Eigen::Index col = 0; col < dz.cols(); ++col) {
    const T* g = dz.col(col).data();
    for (int level = 0; level < levels; ++level) {
      T* grid = grid_grads[static_cast<std::size_t>(level)].data();
      const T* src = g + level * channels;
      for (int corner = 0; corner < 8; ++corner) {
        const std::size_t slot = (static_cast<std::size_t>(col) * levels + level) * 8 + corner;
        const T w = stencil.weight[slot];
        if (w == T(0)) continue;
        T* dst = grid + stencil.index[slot];
        for (int c = 0; c < channels; ++c) dst[c] += w * src[c];
      }
    }
  }
}

/// Activations kept for the backward pass: inputs of every layer plus the
/// final pre-activation.
template <typename T>
struct Tape {
  std::vector<Mat<T>> inputs;
  Mat<T> output;
};

template <typename T>
void mlp_forward(const std::vector<DenseLayer<T>>& mlp, const Mat<T>& x, Tape<T>& tape) {
  tape.inputs.resize(mlp.size());
  tape.inputs[0] = x;
  for (std::size_t l = 0; l < mlp.size(); ++l) {
    Mat<T> a = weight_of(mlp[l]) * tape.inputs[l];
    a.colwise() += bias_of(mlp[l]);
    if (l + 1 < mlp.size())
      tape.inputs[l + 1] = a.cwiseMax(T(0));
    else
      tape.output = std::move(a);
  }
}

template <typename T>
Mat<T> mlp_infer(const std::vector<DenseLayer<T>>& mlp, const Mat<T>& x) {
  Mat<T> h = x;
  for (std::size_t l = 0; l < mlp.size(); ++l) {
    Mat<T> a = weight_of(mlp[l]) * h;
    a.colwise() += bias_of(mlp[l]);
    if (l + 1 < mlp.size()) a = a.cwiseMax(T(0));
    h = std::move(a);
  }
  return h;
}

/// Accumulates parameter gradients for d(loss)/d(output) = `g` and returns
/// d(loss)/d(input).
template <typename T>
Mat<T> mlp_backward(const std::vector<DenseLayer<T>>& mlp, const Tape<T>& tape, Mat<T> g,
                    std::vector<DenseLayer<T>>& grads) {
  for (std::size_t l = mlp.size(); l-- > 0;) {
    Eigen::Map<RowMat<T>> dw(grads[l].weight.data(), grads[l].out, grads[l].in);
    Eigen::Map<Vec<T>> db(grads[l].bias.data(), grads[l].out);
    dw.noalias() += g * tape.inputs[l].transpose();
    db += g.rowwise().sum();
    Mat<T> up = weight_of(mlp[l]).transpose() * g;
    if (l > 0) up = (tape.inputs[l].array() > T(0)).select(up, T(0));
    g = std::move(up);
  }
  return g;
}

template <typename T>
T batch_loss_impl(const ModelParamsT<T>& params, std::span<const TrainingPair> batch, const TrainConfig& cfg,
                  ModelParamsT<T>* grad) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) return T(0);
  std::vector<Vec3> points(batch.size() * 2);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    points[i] = batch[i].first();
    points[batch.size() + i] = batch[i].second();
  }
  Mat<T> z;
  Stencil<T> stencil;
  embed_points(params, points, z, grad ? &stencil : nullptr);
  const Mat<T> zf = z.leftCols(n).cwiseMax(z.rightCols(n));

  Tape<T> flag_tape;
  Tape<T> udf_tape;
  Mat<T> flag_out;
  Mat<T> udf_out;
  if (grad) {
    mlp_forward(params.flag_mlp, zf, flag_tape);
    mlp_forward(params.udf_mlp, z, udf_tape);
    flag_out = flag_tape.output;
    udf_out = udf_tape.output;
  } else {
    flag_out = mlp_infer(params.flag_mlp, zf);
    udf_out = mlp_infer(params.udf_mlp, z);
  }

  const T delta = static_cast<T>(cfg.delta);
  const T lambda = static_cast<T>(cfg.lambda);
  Mat<T> d_flag(1, n);
  Mat<T> d_udf(1, 2 * n);
  T total = T(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const T a = flag_out(0, i);
    const T pred = sigmoid(a);
    const T b = static_cast<T>(batch[static_cast<std::size_t>(i)].flag);
    if (cfg.flag_loss == FlagLoss::L1) {
      total += std::abs(pred - b);
      d_flag(0, i) = sign(pred - b) * pred * (T(1) - pred);
    } else {
      total += softplus(a) - b * a;
      d_flag(0, i) = pred - b;
    }
  }
  for (Eigen::Index j = 0; j < 2 * n; ++j) {
    const auto& rec = batch[static_cast<std::size_t>(j % n)];
    const T gt = static_cast<T>(j < n ? rec.udf1 : rec.udf2);
    const T a = udf_out(0, j);
    const T pred = softplus(a);
    const T diff = std::min(pred, delta) - std::min(gt, delta);
    total += lambda * std::abs(diff);
    d_udf(0, j) = pred < delta ? lambda * sign(diff) * sigmoid(a) : T(0);
  }
  if (!grad) return total;

  if (!same_layout(*grad, params)) {
    *grad = zeros_like_config<T>(params.config);
  } else {
    grad->for_each_tensor([](std::span<T> t) { std::fill(t.begin(), t.end(), T(0)); });
  }
  const Mat<T> dzf = mlp_backward(params.flag_mlp, flag_tape, std::move(d_flag), grad->flag_mlp);
  Mat<T> dz = mlp_backward(params.udf_mlp, udf_tape, std::move(d_udf), grad->udf_mlp);
  const auto z1 = z.leftCols(n);
  const auto z2 = z.rightCols(n);
  // max(z1, z2) routes the gradient to the larger input; ties go to z1.
  dz.leftCols(n) += (z1.array() >= z2.array()).select(dzf, T(0));
  dz.rightCols(n) += (z1.array() >= z2.array()).select(T(0), dzf);
  scatter_embedding_grad(stencil, dz, params.config.grids.channels, grad->grids);
  return total;
}

}  // namespace

template <typename T>
ModelParamsT<T> init_params(const ModelConfig& cfg, RngSeed seed) {
  validate(cfg);
  ModelParamsT<T> p = zeros_like_config<T>(cfg);
  Rng grid_rng = make_rng(seed, 1);
  std::normal_distribution<double> gauss(0.0, 0.01);
  for (auto& g : p.grids)
    for (auto& v : g) v = static_cast<T>(gauss(grid_rng));
  std::uint64_t stream = 2;
  for (auto* mlp : {&p.flag_mlp, &p.udf_mlp}) {
    for (auto& layer : *mlp) {
      Rng rng = make_rng(seed, stream++);
      const double limit = std::sqrt(6.0 / (layer.in + layer.out));
      std::uniform_real_distribution<double> uniform(-limit, limit);
      for (auto& w : layer.weight) w = static_cast<T>(uniform(rng));
    }
  }
  // Start the UDF head inside the truncation band: with a zero bias
  // softplus(0) = 0.69 > delta and the clamped loss has no gradient.
  p.udf_mlp.back().bias[0] = static_cast<T>(std::log(std::expm1(0.05)));
  return p;
}

template <typename To, typename From>
ModelParamsT<To> cast_params(const ModelParamsT<From>& params) {
  ModelParamsT<To> out = zeros_like_config<To>(params.config);
  std::vector<std::span<const From>> src;
  params.for_each_tensor([&](std::span<const From> t) { src.push_back(t); });
  std::size_t i = 0;
  out.for_each_tensor([&](std::span<To> t) {
    std::transform(src[i].begin(), src[i].end(), t.begin(), [](From v) { return static_cast<To>(v); });
    ++i;
  });
  return out;
}

template <typename T>
std::vector<T> embed(const ModelParamsT<T>& params, const Point3& p) {
  Mat<T> z;
  const Vec3 pts[1] = {p};
  embed_points<T>(params, pts, z, nullptr);
  return {z.data(), z.data() + z.size()};
}

template <typename T>
T predict_flag(const ModelParamsT<T>& params, const Point3& p1, const Point3& p2) {
  Mat<T> z;
  const Vec3 pts[2] = {p1, p2};
  embed_points<T>(params, pts, z, nullptr);
  const Mat<T> zf = z.col(0).cwiseMax(z.col(1));
  return sigmoid(mlp_infer(params.flag_mlp, zf)(0, 0));
}

template <typename T>
T predict_udf(const ModelParamsT<T>& params, const Point3& p) {
  Mat<T> z;
  const Vec3 pts[1] = {p};
  embed_points<T>(params, pts, z, nullptr);
  return softplus(mlp_infer(params.udf_mlp, z)(0, 0));
}

template <typename T>
T loss_flag(const ModelParamsT<T>& params, const Point3& p1, const Point3& p2, int b, FlagLoss kind) {
  const T pred = predict_flag(params, p1, p2);
  const T target = static_cast<T>(b);
  if (kind == FlagLoss::L1) return std::abs(pred - target);
  const T eps = std::numeric_limits<T>::min();
  return -(target * std::log(std::max(pred, eps)) + (T(1) - target) * std::log(std::max(T(1) - pred, eps)));
}

template <typename T>
T loss_udf(const ModelParamsT<T>& params, const Point3& p, double gt_udf, double delta) {
  const T d = static_cast<T>(delta);
  return std::abs(std::min(predict_udf(params, p), d) - std::min(static_cast<T>(gt_udf), d));
}

template <typename T>
T loss_batch(const ModelParamsT<T>& params, std::span<const TrainingPair> batch, const TrainConfig& cfg) {
  return batch_loss_impl<T>(params, batch, cfg, nullptr);
}

template <typename T>
T loss_batch_gradient(const ModelParamsT<T>& params, std::span<const TrainingPair> batch, const TrainConfig& cfg,
                      ModelParamsT<T>& grad) {
  return batch_loss_impl<T>(params, batch, cfg, &grad);
}

double dataset_loss(const ModelParams& params, const Dataset& ds, const TrainConfig& cfg) {
  if (ds.records.empty()) return 0.0;
  const std::span<const TrainingPair> all(ds.records);
  const std::size_t step = 1024;
  const std::size_t chunks = (all.size() + step - 1) / step;
  std::vector<double> partial(chunks, 0.0);
  parallel_for_chunks(chunks, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const auto first = c * step;
      partial[c] = loss_batch(params, all.subspan(first, std::min(step, all.size() - first)), cfg);
    }
  });
  return std::accumulate(partial.begin(), partial.end(), 0.0) / static_cast<double>(all.size());
}

namespace {

struct AdamState {
  std::vector<std::vector<float>> m;
  std::vector<std::vector<float>> v;
  std::size_t step = 0;
};

void adam_update(ModelParams& params, const ModelParams& grad, AdamState& state, const TrainConfig& cfg) {
  std::vector<std::span<float>> p_tensors;
  std::vector<std::span<const float>> g_tensors;
  params.for_each_tensor([&](std::span<float> t) { p_tensors.push_back(t); });
  grad.for_each_tensor([&](std::span<const float> t) { g_tensors.push_back(t); });
  if (state.m.empty()) {
    for (const auto& t : p_tensors) {
      state.m.emplace_back(t.size(), 0.0f);
      state.v.emplace_back(t.size(), 0.0f);
    }
  }
  ++state.step;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const auto t = static_cast<double>(state.step);
  const auto step_size = static_cast<float>(cfg.learning_rate / (1.0 - std::pow(b1, t)));
  const auto v_correction = static_cast<float>(1.0 / (1.0 - std::pow(b2, t)));
  const auto fb1 = static_cast<float>(b1);
  const auto fb2 = static_cast<float>(b2);
  const auto eps = static_cast<float>(cfg.adam_epsilon);
  for (std::size_t k = 0; k < p_tensors.size(); ++k) {
    const auto n = static_cast<Eigen::Index>(p_tensors[k].size());
    Eigen::Map<Eigen::ArrayXf> p(p_tensors[k].data(), n);
    Eigen::Map<const Eigen::ArrayXf> g(g_tensors[k].data(), n);
    Eigen::Map<Eigen::ArrayXf> m(state.m[k].data(), n);
    Eigen::Map<Eigen::ArrayXf> v(state.v[k].data(), n);
    m = fb1 * m + (1.0f - fb1) * g;
    v = fb2 * v + (1.0f - fb2) * g.square();
    p -= step_size * m / ((v * v_correction).sqrt() + eps);
  }
}

}  // namespace

TrainResult train(const Dataset& ds, const TrainConfig& tcfg, const ModelConfig& mcfg, const EpochCallback& on_epoch) {
  return train(ds, tcfg, init_params<float>(mcfg, tcfg.seed), on_epoch);
}

TrainResult train(const Dataset& ds, const TrainConfig& tcfg, ModelParams init, const EpochCallback& on_epoch) {
  validate(tcfg);
  validate(init.config);
  TrainResult result{std::move(init), {}};
  if (tcfg.epochs == 0 || ds.records.empty()) return result;

  std::vector<std::size_t> order(ds.records.size());
  std::vector<TrainingPair> batch;
  ModelParams grad;
  AdamState adam;
  for (std::size_t epoch = 0; epoch < tcfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(tcfg.seed, 1000 + epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_total = 0.0;
    for (std::size_t first = 0; first < order.size(); first += tcfg.pairs_per_step) {
      const std::size_t last = std::min(order.size(), first + tcfg.pairs_per_step);
      batch.clear();
      for (std::size_t i = first; i < last; ++i) batch.push_back(ds.records[order[i]]);
      const float loss = loss_batch_gradient(result.params, std::span<const TrainingPair>(batch), tcfg, grad);
      if (!std::isfinite(loss))
        throw DivergedTraining("non-finite loss at epoch " + std::to_string(epoch));
      epoch_total += loss;
      adam_update(result.params, grad, adam, tcfg);
    }
    const double mean = epoch_total / static_cast<double>(order.size());
    result.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

LearnedField::LearnedField(ModelParams params) : params_(std::move(params)) { validate(params_.config); }

double LearnedField::flag(const Point3& p1, const Point3& p2) const { return predict_flag(params_, p1, p2); }

double LearnedField::udf(const Point3& p) const { return predict_udf(params_, p); }

namespace {
// Fixed inference block; chunking never depends on the worker count.
constexpr std::size_t kInferenceBlock = 256;
}  // namespace

void LearnedField::flag_batch(std::span<const PointPair> pairs, std::span<double> out) const {
  if (out.size() != pairs.size()) throw InvalidArgument("flag_batch output size mismatch");
  parallel_for_chunks(pairs.size(), kInferenceBlock, [&](std::size_t begin, std::size_t end) {
    const auto n = static_cast<Eigen::Index>(end - begin);
    std::vector<Vec3> points(2 * (end - begin));
    for (std::size_t i = begin; i < end; ++i) {
      points[i - begin] = pairs[i].first;
      points[end - begin + (i - begin)] = pairs[i].second;
    }
    Mat<float> z;
    embed_points<float>(params_, points, z, nullptr);
    const Mat<float> zf = z.leftCols(n).cwiseMax(z.rightCols(n));
    const Mat<float> a = mlp_infer(params_.flag_mlp, zf);
    for (Eigen::Index i = 0; i < n; ++i) out[begin + static_cast<std::size_t>(i)] = sigmoid(a(0, i));
  });
}

void LearnedField::udf_batch(std::span<const Point3> points, std::span<double> out) const {
  if (out.size() != points.size()) throw InvalidArgument("udf_batch output size mismatch");
  parallel_for_chunks(points.size(), kInferenceBlock, [&](std::size_t begin, std::size_t end) {
    Mat<float> z;
    embed_points<float>(params_, points.subspan(begin, end - begin), z, nullptr);
    const Mat<float> a = mlp_infer(params_.udf_mlp, z);
    for (Eigen::Index i = 0; i < a.cols(); ++i) out[begin + static_cast<std::size_t>(i)] = softplus(a(0, i));
  });
}

namespace {

constexpr char kModelMagic[13] = {'G', 'I', 'F', 'S', 'M', 'O', 'D', 'L', ' ', 'v', '0', '0', '1'};

json model_config_json(const ModelConfig& cfg) {
  json j;
  j["format_version"] = 1;
  j["grid"] = {{"resolutions", cfg.grids.resolutions}, {"channels", cfg.grids.channels}};
  j["decoder"] = {{"hidden_width", cfg.decoder.hidden_width}, {"layers", cfg.decoder.layers}};
  return j;
}

}  // namespace

void write_model(std::ostream& out, const ModelParams& params) {
  json j = model_config_json(params.config);
  json tensors = json::array();
  params.for_each_tensor([&](std::span<const float> t) { tensors.push_back(t.size()); });
  j["tensor_sizes"] = std::move(tensors);
  const std::string header = j.dump();
  const auto len = static_cast<std::uint32_t>(header.size());
  out.write(kModelMagic, sizeof(kModelMagic));
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  params.for_each_tensor([&](std::span<const float> t) {
    out.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size_bytes()));
  });
  if (!out) throw IoError("failed writing model");
}

void write_model(const std::filesystem::path& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_model(out, params);
}

ModelParams read_model(std::istream& in) {
  char magic[sizeof(kModelMagic)];
  in.read(magic, sizeof(magic));
  if (static_cast<std::size_t>(in.gcount()) != sizeof(magic) || std::memcmp(magic, kModelMagic, 9) != 0)
    throw FormatError("not a GIFS model (bad magic)");
  if (std::memcmp(magic + 9, kModelMagic + 9, 4) != 0) throw FormatError("unsupported model format version");
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (in.gcount() != sizeof(len)) throw TruncatedFile("model ends inside the header length");
  std::string header(len, '\0');
  in.read(header.data(), len);
  if (static_cast<std::size_t>(in.gcount()) != len) throw TruncatedFile("model ends inside the header");

  ModelConfig cfg;
  std::vector<std::size_t> sizes;
  try {
    const json j = json::parse(header);
    if (j.at("format_version").get<int>() != 1) throw FormatError("unsupported model format version");
    cfg.grids.resolutions = j.at("grid").at("resolutions").get<std::vector<int>>();
    cfg.grids.channels = j.at("grid").at("channels").get<int>();
    cfg.decoder.hidden_width = j.at("decoder").at("hidden_width").get<int>();
    cfg.decoder.layers = j.at("decoder").at("layers").get<int>();
    sizes = j.at("tensor_sizes").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid model header: ") + e.what());
  }
  try {
    validate(cfg);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid model config: ") + e.what());
  }
  ModelParams params = zeros_like_config<float>(cfg);
  std::size_t k = 0;
  bool shapes_ok = true;
  params.for_each_tensor([&](std::span<float> t) {
    shapes_ok = shapes_ok && k < sizes.size() && sizes[k] == t.size();
    ++k;
  });
  if (!shapes_ok || k != sizes.size()) throw FormatError("model tensor sizes do not match the config");
  params.for_each_tensor([&](std::span<float> t) {
    in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size_bytes()));
    if (static_cast<std::size_t>(in.gcount()) != t.size_bytes()) throw TruncatedFile("model ends inside a tensor");
    for (float v : t)
      if (!std::isfinite(v)) throw CorruptRecord("model contains a non-finite weight");
  });
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after model tensors");
  return params;
}

ModelParams read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file " + path.string());
  return read_model(in);
}

#define GIFS_INSTANTIATE(T)                                                                               \
  template ModelParamsT<T> init_params<T>(const ModelConfig&, RngSeed);                                    \
  template std::vector<T> embed<T>(const ModelParamsT<T>&, const Point3&);                                 \
  template T predict_flag<T>(const ModelParamsT<T>&, const Point3&, const Point3&);                        \
  template T predict_udf<T>(const ModelParamsT<T>&, const Point3&);                                        \
  template T loss_flag<T>(const ModelParamsT<T>&, const Point3&, const Point3&, int, FlagLoss);            \
  template T loss_udf<T>(const ModelParamsT<T>&, const Point3&, double, double);                           \
  template T loss_batch<T>(const ModelParamsT<T>&, std::span<const TrainingPair>, const TrainConfig&);     \
  template T loss_batch_gradient<T>(const ModelParamsT<T>&, std::span<const TrainingPair>, const TrainConfig&, \
                                    ModelParamsT<T>&);

GIFS_INSTANTIATE(float)
GIFS_INSTANTIATE(double)
#undef GIFS_INSTANTIATE

template ModelParamsT<double> cast_params<double, float>(const ModelParamsT<float>&);
template ModelParamsT<float> cast_params<float, double>(const ModelParamsT<double>&);
template ModelParamsT<float> cast_params<float, float>(const ModelParamsT<float>&);
template ModelParamsT<double> cast_params<double, double>(const ModelParamsT<double>&);

}  // namespace gifs
