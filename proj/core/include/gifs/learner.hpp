#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "gifs/datagen.hpp"
#include "gifs/field.hpp"
#include "gifs/sampling.hpp"

namespace gifs {

/// Multi-resolution dense feature grids spanning [-0.5, 0.5]^3. A level of
/// size K has K nodes per axis; features are trilinearly interpolated.
struct FeatureGridConfig {
  std::vector<int> resolutions{8, 16, 32};
  int channels = 16;

  int embedding_size() const { return static_cast<int>(resolutions.size()) * channels; }
  friend bool operator==(const FeatureGridConfig&, const FeatureGridConfig&) = default;
};

/// Both heads share this topology: `layers` linear layers, ReLU between
/// them, `hidden_width` units in every internal layer.
struct DecoderConfig {
  int hidden_width = 256;
  int layers = 5;
  friend bool operator==(const DecoderConfig&, const DecoderConfig&) = default;
};

struct ModelConfig {
  FeatureGridConfig grids;
  DecoderConfig decoder;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void validate(const ModelConfig& cfg);

enum class FlagLoss { L1, BinaryCrossEntropy };

struct TrainConfig {
  double delta = 0.1;
  double lambda = 10.0;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t pairs_per_step = 512;
  std::size_t epochs = 1;
  RngSeed seed{0};
  FlagLoss flag_loss = FlagLoss::L1;
};

void validate(const TrainConfig& cfg);

/// 64-byte aligned storage, so vectorized kernels take the same code path
/// (and summation order) regardless of where a tensor lands in memory.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlignment)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

  friend bool operator==(const AlignedAllocator&, const AlignedAllocator&) { return true; }
};

template <typename T>
using Tensor = std::vector<T, AlignedAllocator<T>>;

template <typename T>
struct DenseLayer {
  int in = 0;
  int out = 0;
  Tensor<T> weight;  // row-major, out x in
  Tensor<T> bias;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Learnable state: per-level feature grids (stand-in for a point-cloud
/// encoder), the flag decoder and the UDF head.
template <typename T>
struct ModelParamsT {
  ModelConfig config;
  std::vector<Tensor<T>> grids;  // level -> K^3 * C, index ((z*K + y)*K + x)*C + c
  std::vector<DenseLayer<T>> flag_mlp;
  std::vector<DenseLayer<T>> udf_mlp;

  std::size_t parameter_count() const;
  /// Visits every tensor in declared (serialization) order.
  template <typename Fn>
  void for_each_tensor(Fn&& fn);
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const;

  friend bool operator==(const ModelParamsT&, const ModelParamsT&) = default;
};

using ModelParams = ModelParamsT<float>;

template <typename T>
ModelParamsT<T> init_params(const ModelConfig& cfg, RngSeed seed);

/// Same parameter values at another precision.
template <typename To, typename From>
ModelParamsT<To> cast_params(const ModelParamsT<From>& params);

/// Per-level trilinear features at `p`, concatenated. Points outside the
/// unit cube are clamped onto it.
template <typename T>
std::vector<T> embed(const ModelParamsT<T>& params, const Point3& p);

/// sigmoid(f(max(z1, z2))); exactly symmetric in its arguments.
template <typename T>
T predict_flag(const ModelParamsT<T>& params, const Point3& p1, const Point3& p2);

/// softplus(h(z)), always >= 0.
template <typename T>
T predict_udf(const ModelParamsT<T>& params, const Point3& p);

/// |prediction - b| for L1; the binary cross-entropy alternative is selectable.
template <typename T>
T loss_flag(const ModelParamsT<T>& params, const Point3& p1, const Point3& p2, int b,
            FlagLoss kind = FlagLoss::L1);

/// |min(prediction, delta) - min(gt, delta)|.
template <typename T>
T loss_udf(const ModelParamsT<T>& params, const Point3& p, double gt_udf, double delta);

/// Sum over the batch of L_flag + lambda * (L_udf(p1) + L_udf(p2)).
template <typename T>
T loss_batch(const ModelParamsT<T>& params, std::span<const TrainingPair> batch, const TrainConfig& cfg);

/// loss_batch plus its gradient; `grad` is resized to match `params` and
/// overwritten.
template <typename T>
T loss_batch_gradient(const ModelParamsT<T>& params, std::span<const TrainingPair> batch, const TrainConfig& cfg,
                      ModelParamsT<T>& grad);

/// Mean per-pair loss over a whole dataset.
double dataset_loss(const ModelParams& params, const Dataset& ds, const TrainConfig& cfg);

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;  // running mean per-pair loss of each epoch
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

/// Adam on loss_batch over shuffled minibatches. Deterministic for a given
/// seed. Throws DivergedTraining on a non-finite loss.
TrainResult train(const Dataset& ds, const TrainConfig& tcfg, const ModelConfig& mcfg,
                  const EpochCallback& on_epoch = {});
/// Continues from existing parameters.
TrainResult train(const Dataset& ds, const TrainConfig& tcfg, ModelParams init,
                  const EpochCallback& on_epoch = {});

/// Batched float32 inference behind the PairField interface.
class LearnedField final : public PairField {
 public:
  explicit LearnedField(ModelParams params);

  double flag(const Point3& p1, const Point3& p2) const override;
  double udf(const Point3& p) const override;
  void flag_batch(std::span<const PointPair> pairs, std::span<double> out) const override;
  void udf_batch(std::span<const Point3> points, std::span<double> out) const override;

  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
};

/// Layout: magic "GIFSMODL v001", uint32 LE config length, JSON config,
/// then little-endian float32 tensors in declared order.
void write_model(std::ostream& out, const ModelParams& params);
void write_model(const std::filesystem::path& path, const ModelParams& params);
ModelParams read_model(std::istream& in);
ModelParams read_model(const std::filesystem::path& path);

template <typename T>
std::size_t ModelParamsT<T>::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor([&n](std::span<const T> t) { n += t.size(); });
  return n;
}

template <typename T>
template <typename Fn>
void ModelParamsT<T>::for_each_tensor(Fn&& fn) {
  for (auto& g : grids) fn(std::span<T>(g));
  for (auto* mlp : {&flag_mlp, &udf_mlp}) {
    for (auto& layer : *mlp) {
      fn(std::span<T>(layer.weight));
      fn(std::span<T>(layer.bias));
    }
  }
}

template <typename T>
template <typename Fn>
void ModelParamsT<T>::for_each_tensor(Fn&& fn) const {
  for (const auto& g : grids) fn(std::span<const T>(g));
  for (const auto* mlp : {&flag_mlp, &udf_mlp}) {
    for (const auto& layer : *mlp) {
      fn(std::span<const T>(layer.weight));
      fn(std::span<const T>(layer.bias));
    }
  }
}

}  // namespace gifs
