#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "smellnet/nn/tensor.hpp"
#include "smellnet/random.hpp"

namespace smellnet::nn {

enum class Mode { train, infer };

/// Per-pass state threaded through the layer stack. An embedding layer sets
/// `mask` ([n, L], 1 = real token) and recurrent layers consume it.
struct ForwardContext {
  Mode mode = Mode::infer;
  Rng* rng = nullptr;
  std::vector<std::uint8_t> mask;
  std::size_t mask_steps = 0;

  bool has_mask() const { return !mask.empty(); }
};

struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;
};

class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string kind() const = 0;

  /// Creates parameters for a per-sample input shape (batch axis excluded)
  /// and returns the per-sample output shape.
  virtual Shape build(const Shape& input, Rng& rng) = 0;

  virtual Tensor forward(const Tensor& x, ForwardContext& ctx) = 0;

  /// Accumulates parameter gradients and returns the input gradient.
  virtual Tensor backward(const Tensor& dy) = 0;

  virtual std::vector<Param*> params() { return {}; }
};

enum class Activation { relu, sigmoid, tanh };

std::string to_string(Activation a);

class Dense : public Layer {
 public:
  explicit Dense(std::size_t units);
  std::string kind() const override { return "dense"; }
  Shape build(const Shape& input, Rng& rng) override;
  Tensor forward(const Tensor& x, ForwardContext& ctx) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Param*> params() override { return {&kernel_, &bias_}; }

  Param& kernel() { return kernel_; }
  Param& bias() { return bias_; }

 private:
  std::size_t units_;
  std::size_t in_ = 0;
  Param kernel_{"kernel", {}, {}};
  Param bias_{"bias", {}, {}};
  Tensor x_;
};

class ActivationLayer : public Layer {
 public:
  explicit ActivationLayer(Activation a) : act_(a) {}
  std::string kind() const override { return to_string(act_); }
  Shape build(const Shape& input, Rng&) override { return input; }
  Tensor forward(const Tensor& x, ForwardContext& ctx) override;
  Tensor backward(const Tensor& dy) override;

 private:
  Activation act_;
  Tensor y_;
};

/// Inverted dropout: survivors are scaled by 1/(1-rate) during training.
class Dropout : public Layer {
 public:
  explicit Dropout(double rate);
  std::string kind() const override { return "dropout"; }
  Shape build(const Shape& input, Rng&) override { return input; }
  Tensor forward(const Tensor& x, ForwardContext& ctx) override;
  Tensor backward(const Tensor& dy) override;

 private:
  double rate_;
  std::vector<double> scale_;
};

class Flatten : public Layer {
 public:
  std::string kind() const override { return "flatten"; }
  Shape build(const Shape& input, Rng&) override { return {shape_size(input)}; }
  Tensor forward(const Tensor& x, ForwardContext& ctx) override;
  Tensor backward(const Tensor& dy) override;

 private:
  Shape in_shape_;
};

/// Normalizes over every axis except the last (channel) axis.
class BatchNorm : public Layer {
 public:
  explicit BatchNorm(double epsilon = 1e-3, double momentum = 0.99)
      : epsilon_(epsilon), momentum_(momentum) {}
  std::string kind() const override { return "batchnorm"; }
  Shape build(const Shape& input, Rng& rng) override;
  Tensor forward(const Tensor& x, ForwardContext& ctx) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Param*> params() override { return {&gamma_, &beta_, &moving_mean_, &moving_var_}; }

  Param& gamma() { return gamma_; }
  Param& beta() { return beta_; }
  Param& moving_mean() { return moving_mean_; }
  Param& moving_variance() { return moving_var_; }

 private:
  double epsilon_;
  double momentum_;
  std::size_t channels_ = 0;
  Param gamma_{"gamma", {}, {}};
  Param beta_{"beta", {}, {}};
  Param moving_mean_{"moving_mean", {}, {}, false};
  Param moving_var_{"moving_variance", {}, {}, false};
  Tensor xhat_;
  std::vector<double> inv_std_;
  bool used_batch_stats_ = false;
};

/// Valid padding, stride 1. Input [n, L, C], kernel [k, C, F].
class Conv1D : public Layer {
 public:
  Conv1D(std::size_t filters, std::size_t kernel);
  std::string kind() const override { return "conv1d"; }
  Shape build(const Shape& input, Rng& rng) override;
  Tensor forward(const Tensor& x, ForwardContext& ctx) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Param*> params() override { return {&kernel_, &bias_}; }

  Param& kernel() { return kernel_; }
  Param& bias() { return bias_; }

 private:
  std::size_t filters_, k_;
  std::size_t channels_ = 0;
  Param kernel_{"kernel", {}, {}};
  Param bias_{"bias", {}, {}};
  Tensor x_;
};

/// Valid padding, stride 1. Input [n, H, W, C], kernel [k, k, C, F].
class Conv2D : public Layer {
 public:
  Conv2D(std::size_t filters, std::size_t kernel);
  std::string kind() const override { return "conv2d"; }
  Shape build(const Shape& input, Rng& rng) override;
  Tensor forward(const Tensor& x, ForwardContext& ctx) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Param*> params() override { return {&kernel_, &bias_}; }

  Param& kernel() { return kernel_; }
  Param& bias() { return bias_; }

 private:
  std::size_t filters_, k_;
  std::size_t channels_ = 0;
  Param kernel_{"kernel", {}, {}};
  Param bias_{"bias", {}, {}};
  Tensor x_;
};

/// Stride equals the window; trailing elements that do not fill a window are
/// dropped. Gradient goes to the first maximum of each window.
class MaxPool1D : public Layer {
 public:
  explicit MaxPool1D(std::size_t window);
  std::string kind() const override { return "maxpool1d"; }
  Shape build(const Shape& input, Rng& rng) override;
  Tensor forward(const Tensor& x, ForwardContext& ctx) override;
  Tensor backward(const Tensor& dy) override;

 private:
  std::size_t w_;
  Shape in_shape_;
  std::vector<std::size_t> argmax_;
};

class MaxPool2D : public Layer {
 public:
  explicit MaxPool2D(std::size_t window);
  std::string kind() const override { return "maxpool2d"; }
  Shape build(const Shape& input, Rng& rng) override;
  Tensor forward(const Tensor& x, ForwardContext& ctx) override;
  Tensor backward(const Tensor& dy) override;

 private:
  std::size_t w_;
  Shape in_shape_;
  std::vector<std::size_t> argmax_;
};

/// Input [n, L] of token ids stored as doubles; output [n, L, E]. With
/// mask_zero, id 0 positions are flagged in the context mask.
class Embedding : public Layer {
 public:
  Embedding(std::size_t vocab, std::size_t dim, bool mask_zero = true);
  std::string kind() const override { return "embedding"; }
  Shape build(const Shape& input, Rng& rng) override;
  Tensor forward(const Tensor& x, ForwardContext& ctx) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Param*> params() override { return {&table_}; }

  Param& table() { return table_; }

 private:
  std::size_t vocab_, dim_;
  bool mask_zero_;
  Param table_{"embeddings", {}, {}};
  std::vector<std::size_t> ids_;
  Shape in_shape_;
};

/// Gate order in the fused weights is input, forget, cell, output. Dropout
/// masks are drawn once per sequence. Masked steps carry (h, c) through.
class LSTM : public Layer {
 public:
  LSTM(std::size_t units, bool return_sequences, double dropout = 0.0,
       double recurrent_dropout = 0.0);
  std::string kind() const override { return "lstm"; }
  Shape build(const Shape& input, Rng& rng) override;
  Tensor forward(const Tensor& x, ForwardContext& ctx) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Param*> params() override { return {&kernel_, &recurrent_, &bias_}; }

  Param& kernel() { return kernel_; }
  Param& recurrent_kernel() { return recurrent_; }
  Param& bias() { return bias_; }

 private:
  std::size_t units_;
  bool return_sequences_;
  double dropout_, recurrent_dropout_;
  std::size_t in_ = 0;
  Param kernel_{"kernel", {}, {}};
  Param recurrent_{"recurrent_kernel", {}, {}};
  Param bias_{"bias", {}, {}};

  // Caches for backpropagation through time, indexed [t][b * width + j].
  std::size_t n_ = 0, steps_ = 0;
  std::vector<std::uint8_t> valid_;            // [b * steps + t]
  std::vector<double> x_drop_, h_drop_;        // per-sequence scales
  std::vector<std::vector<double>> xin_, hin_, gates_, c_, c_prev_;
};

/// Constructor parameters for any layer kind.
struct LayerSpec {
  enum class Kind {
    dense, conv1d, conv2d, batchnorm, maxpool1d, maxpool2d, dropout, flatten, embedding, lstm,
    activation
  };
  Kind kind = Kind::dense;
  std::size_t units = 0;  // dense units, conv filters, lstm units
  std::size_t kernel = 0;
  std::size_t pool = 0;
  double rate = 0.0;  // dropout, lstm input dropout
  double recurrent_rate = 0.0;
  std::size_t vocab = 0;
  std::size_t embedding_dim = 0;
  bool return_sequences = false;
  Activation activation = Activation::relu;

  /// Throws std::invalid_argument when a size is zero or a rate is outside [0, 1).
  void validate() const;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec);

}  // namespace smellnet::nn
