#include <cmath>

#include "init.hpp"
#include "smellnet/nn/layers.hpp"

namespace smellnet::nn {

void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : t.data) v = rng.uniform(-limit, limit);
}

void init_param(Param& p, Shape shape) {
  p.value = Tensor(shape);
  p.grad = Tensor(std::move(shape));
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  return "?";
}

Dense::Dense(std::size_t units) : units_(units) {
  if (units == 0) throw std::invalid_argument("dense layer needs at least one unit");
}

Shape Dense::build(const Shape& input, Rng& rng) {
  if (input.size() != 1) throw ShapeMismatch("dense expects a flat input, got " + shape_string(input));
  in_ = input[0];
  init_param(kernel_, {in_, units_});
  init_param(bias_, {units_});
  glorot_uniform(kernel_.value, in_, units_, rng);
  return {units_};
}

Tensor Dense::forward(const Tensor& x, ForwardContext&) {
  expect_rank(x, 2, "dense");
  if (x.dim(1) != in_) throw ShapeMismatch("dense: input width " + shape_string(x.shape));
  const std::size_t n = x.dim(0);
  Tensor y({n, units_});
  const double* w = kernel_.value.data.data();
  for (std::size_t b = 0; b < n; ++b) {
    double* out = &y.data[b * units_];
    for (std::size_t u = 0; u < units_; ++u) out[u] = bias_.value[u];
    for (std::size_t d = 0; d < in_; ++d) {
      const double xv = x.data[b * in_ + d];
      const double* row = w + d * units_;
      for (std::size_t u = 0; u < units_; ++u) out[u] += xv * row[u];
    }
  }
  x_ = x;
  return y;
}

Tensor Dense::backward(const Tensor& dy) {
  const std::size_t n = x_.dim(0);
  expect_shape(dy, {n, units_}, "dense backward");
  Tensor dx({n, in_});
  const double* w = kernel_.value.data.data();
  double* dw = kernel_.grad.data.data();
  for (std::size_t b = 0; b < n; ++b) {
    const double* g = &dy.data[b * units_];
    for (std::size_t u = 0; u < units_; ++u) bias_.grad[u] += g[u];
    for (std::size_t d = 0; d < in_; ++d) {
      const double xv = x_.data[b * in_ + d];
      const double* row = w + d * units_;
      double* drow = dw + d * units_;
      double acc = 0;
      for (std::size_t u = 0; u < units_; ++u) {
        drow[u] += xv * g[u];
        acc += row[u] * g[u];
      }
      dx.data[b * in_ + d] = acc;
    }
  }
  return dx;
}

Tensor ActivationLayer::forward(const Tensor& x, ForwardContext&) {
  Tensor y = x;
  for (auto& v : y.data) {
    switch (act_) {
      case Activation::relu: v = v > 0 ? v : 0.0; break;
      case Activation::sigmoid: v = 1.0 / (1.0 + std::exp(-v)); break;
      case Activation::tanh: v = std::tanh(v); break;
    }
  }
  y_ = y;
  return y;
}

Tensor ActivationLayer::backward(const Tensor& dy) {
  expect_shape(dy, y_.shape, "activation backward");
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double y = y_.data[i];
    switch (act_) {
      case Activation::relu: dx.data[i] = y > 0 ? dy.data[i] : 0.0; break;
      case Activation::sigmoid: dx.data[i] *= y * (1.0 - y); break;
      case Activation::tanh: dx.data[i] *= 1.0 - y * y; break;
    }
  }
  return dx;
}

Dropout::Dropout(double rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout rate must lie in [0, 1)");
}

Tensor Dropout::forward(const Tensor& x, ForwardContext& ctx) {
  scale_.clear();
  if (ctx.mode == Mode::infer || rate_ == 0.0) return x;
  if (!ctx.rng) throw std::logic_error("dropout in training mode needs a generator");
  const double keep = 1.0 / (1.0 - rate_);
  scale_.resize(x.size());
  Tensor y = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    scale_[i] = ctx.rng->bernoulli(rate_) ? 0.0 : keep;
    y.data[i] *= scale_[i];
  }
  return y;
}

Tensor Dropout::backward(const Tensor& dy) {
  if (scale_.empty()) return dy;
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] *= scale_[i];
  return dx;
}

Tensor Flatten::forward(const Tensor& x, ForwardContext&) {
  if (x.rank() < 2) throw ShapeMismatch("flatten needs a batch axis");
  in_shape_ = x.shape;
  return x.reshaped({x.dim(0), x.size() / x.dim(0)});
}

Tensor Flatten::backward(const Tensor& dy) { return dy.reshaped(in_shape_); }

Shape BatchNorm::build(const Shape& input, Rng&) {
  if (input.empty()) throw ShapeMismatch("batchnorm needs a channel axis");
  channels_ = input.back();
  init_param(gamma_, {channels_});
  init_param(beta_, {channels_});
  init_param(moving_mean_, {channels_});
  init_param(moving_var_, {channels_});
  gamma_.value.fill(1.0);
  moving_var_.value.fill(1.0);
  return input;
}

Tensor BatchNorm::forward(const Tensor& x, ForwardContext& ctx) {
  if (x.rank() < 2 || x.shape.back() != channels_) {
    throw ShapeMismatch("batchnorm: unexpected input " + shape_string(x.shape));
  }
  const std::size_t rows = x.size() / channels_;
  std::vector<double> mean(channels_, 0.0), var(channels_, 0.0);
  used_batch_stats_ = ctx.mode == Mode::train;
  if (used_batch_stats_) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < channels_; ++c) mean[c] += x.data[r * channels_ + c];
    }
    for (auto& m : mean) m /= static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < channels_; ++c) {
        const double d = x.data[r * channels_ + c] - mean[c];
        var[c] += d * d;
      }
    }
    for (std::size_t c = 0; c < channels_; ++c) {
      var[c] /= static_cast<double>(rows);
      moving_mean_.value[c] = momentum_ * moving_mean_.value[c] + (1.0 - momentum_) * mean[c];
      moving_var_.value[c] = momentum_ * moving_var_.value[c] + (1.0 - momentum_) * var[c];
    }
  } else {
    mean = moving_mean_.value.data;
    var = moving_var_.value.data;
  }
  inv_std_.resize(channels_);
  for (std::size_t c = 0; c < channels_; ++c) inv_std_[c] = 1.0 / std::sqrt(var[c] + epsilon_);
  xhat_ = Tensor(x.shape);
  Tensor y(x.shape);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < channels_; ++c) {
      const std::size_t i = r * channels_ + c;
      xhat_.data[i] = (x.data[i] - mean[c]) * inv_std_[c];
      y.data[i] = gamma_.value[c] * xhat_.data[i] + beta_.value[c];
    }
  }
  return y;
}

Tensor BatchNorm::backward(const Tensor& dy) {
  expect_shape(dy, xhat_.shape, "batchnorm backward");
  const std::size_t rows = dy.size() / channels_;
  std::vector<double> sum_dy(channels_, 0.0), sum_dy_xhat(channels_, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < channels_; ++c) {
      const std::size_t i = r * channels_ + c;
      sum_dy[c] += dy.data[i];
      sum_dy_xhat[c] += dy.data[i] * xhat_.data[i];
    }
  }
  for (std::size_t c = 0; c < channels_; ++c) {
    gamma_.grad[c] += sum_dy_xhat[c];
    beta_.grad[c] += sum_dy[c];
  }
  Tensor dx(dy.shape);
  const double m = static_cast<double>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < channels_; ++c) {
      const std::size_t i = r * channels_ + c;
      const double scale = gamma_.value[c] * inv_std_[c];
      if (used_batch_stats_) {
        dx.data[i] = scale * (dy.data[i] - sum_dy[c] / m - xhat_.data[i] * sum_dy_xhat[c] / m);
      } else {
        dx.data[i] = scale * dy.data[i];
      }
    }
  }
  return dx;
}

void LayerSpec::validate() const {
  auto positive = [](std::size_t v, const char* what) {
    if (v == 0) throw std::invalid_argument(std::string(what) + " must be positive");
  };
  auto rate_ok = [](double r, const char* what) {
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1)");
  };
  switch (kind) {
    case Kind::dense: positive(units, "units"); break;
    case Kind::conv1d:
    case Kind::conv2d:
      positive(units, "filters");
      positive(kernel, "kernel");
      break;
    case Kind::maxpool1d:
    case Kind::maxpool2d: positive(pool, "pool window"); break;
    case Kind::dropout: rate_ok(rate, "dropout rate"); break;
    case Kind::embedding:
      positive(vocab, "vocabulary size");
      positive(embedding_dim, "embedding dimension");
      break;
    case Kind::lstm:
      positive(units, "recurrent units");
      rate_ok(rate, "dropout rate");
      rate_ok(recurrent_rate, "recurrent dropout rate");
      break;
    case Kind::batchnorm:
    case Kind::flatten:
    case Kind::activation: break;
  }
}

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
  spec.validate();
  using K = LayerSpec::Kind;
  switch (spec.kind) {
    case K::dense: return std::make_unique<Dense>(spec.units);
    case K::conv1d: return std::make_unique<Conv1D>(spec.units, spec.kernel);
    case K::conv2d: return std::make_unique<Conv2D>(spec.units, spec.kernel);
    case K::batchnorm: return std::make_unique<BatchNorm>();
    case K::maxpool1d: return std::make_unique<MaxPool1D>(spec.pool);
    case K::maxpool2d: return std::make_unique<MaxPool2D>(spec.pool);
    case K::dropout: return std::make_unique<Dropout>(spec.rate);
    case K::flatten: return std::make_unique<Flatten>();
    case K::embedding: return std::make_unique<Embedding>(spec.vocab, spec.embedding_dim, true);
    case K::lstm:
      return std::make_unique<LSTM>(spec.units, spec.return_sequences, spec.rate,
                                    spec.recurrent_rate);
    case K::activation: return std::make_unique<ActivationLayer>(spec.activation);
  }
  throw std::invalid_argument("unknown layer kind");
}

}  // namespace smellnet::nn
