#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "smellnet/nn/layers.hpp"

namespace smellnet::nn {

/// A linear stack of layers. Parameters are named "<kind>_<index>/<param>".
class Sequential {
 public:
  void add(std::unique_ptr<Layer> layer);
  void add(const LayerSpec& spec) { add(make_layer(spec)); }

  /// Builds every layer for a per-sample input shape; throws InputTooShort
  /// when some window no longer fits.
  Shape build(const Shape& sample_shape, std::uint64_t seed);
  bool built() const { return built_; }
  const Shape& input_shape() const { return input_shape_; }
  const Shape& output_shape() const { return output_shape_; }

  Tensor forward(const Tensor& x, Mode mode, Rng* rng = nullptr);
  Tensor backward(const Tensor& dy);

  void zero_grad();
  std::vector<Param*> params();
  std::size_t parameter_count(bool trainable_only = true);

  /// Inference-mode outputs for all rows, flattened.
  std::vector<double> predict(const Tensor& x, std::size_t batch = 256);

  std::vector<Tensor> snapshot();
  void restore(const std::vector<Tensor>& values);

  std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  Shape input_shape_, output_shape_;
  bool built_ = false;
};

inline constexpr double kProbabilityClamp = 1e-7;

/// Mean binary cross-entropy with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(const std::vector<double>& p, const std::vector<double>& y);

/// d(bce_loss)/dp; zero where the clamp is active.
std::vector<double> bce_grad(const std::vector<double>& p, const std::vector<double>& y);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

/// First/second moment accumulators, shaped like the parameters they track.
struct OptimizerState {
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::uint64_t step = 0;
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// Updates every trainable parameter from its accumulated gradient.
  void step(const std::vector<Param*>& params);

  const OptimizerState& state() const { return state_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  OptimizerState state_;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst;
  std::size_t checked = 0;
};

/// Central finite differences of the mean BCE over every trainable parameter
/// (and, if asked, every input element). Dropout masks are redrawn from
/// `seed` on each pass so the function being differentiated is fixed.
GradCheckResult grad_check(Sequential& model, const Tensor& x, const std::vector<double>& y,
                           double eps = 1e-5, std::uint64_t seed = 0,
                           bool include_inputs = false);

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

/// Per entry: u32 name length, name bytes, u32 rank, u32 dims, f32 values;
/// all little-endian.
void save_checkpoint(const std::filesystem::path& file, const NamedTensors& tensors);
NamedTensors load_checkpoint(const std::filesystem::path& file);

void save_weights(Sequential& model, const std::filesystem::path& file);
/// Every model parameter must be present with a matching shape.
void load_weights(Sequential& model, const std::filesystem::path& file);

}  // namespace smellnet::nn
