#include <limits>

#include "init.hpp"
#include "smellnet/nn/layers.hpp"

namespace smellnet::nn {

Conv1D::Conv1D(std::size_t filters, std::size_t kernel) : filters_(filters), k_(kernel) {
  if (filters == 0 || kernel == 0) throw std::invalid_argument("conv1d needs filters and kernel > 0");
}

Shape Conv1D::build(const Shape& input, Rng& rng) {
  if (input.size() != 2) throw ShapeMismatch("conv1d expects [length, channels], got " + shape_string(input));
  if (input[0] < k_) {
    throw InputTooShort("conv1d kernel " + std::to_string(k_) + " exceeds length " +
                        std::to_string(input[0]));
  }
  channels_ = input[1];
  init_param(kernel_, {k_, channels_, filters_});
  init_param(bias_, {filters_});
  glorot_uniform(kernel_.value, k_ * channels_, k_ * filters_, rng);
  return {input[0] - k_ + 1, filters_};
}

Tensor Conv1D::forward(const Tensor& x, ForwardContext&) {
  expect_rank(x, 3, "conv1d");
  if (x.dim(2) != channels_) throw ShapeMismatch("conv1d: channel count " + shape_string(x.shape));
  if (x.dim(1) < k_) throw InputTooShort("conv1d: input shorter than kernel");
  const std::size_t n = x.dim(0), len = x.dim(1), out_len = len - k_ + 1;
  const std::size_t C = channels_, F = filters_;
  Tensor y({n, out_len, F});
  const double* w = kernel_.value.data.data();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t t = 0; t < out_len; ++t) {
      double* out = &y.data[(b * out_len + t) * F];
      for (std::size_t f = 0; f < F; ++f) out[f] = bias_.value[f];
      for (std::size_t j = 0; j < k_; ++j) {
        const double* in = &x.data[(b * len + t + j) * C];
        for (std::size_t c = 0; c < C; ++c) {
          const double xv = in[c];
          const double* wr = w + (j * C + c) * F;
          for (std::size_t f = 0; f < F; ++f) out[f] += xv * wr[f];
        }
      }
    }
  }
  x_ = x;
  return y;
}

Tensor Conv1D::backward(const Tensor& dy) {
  const std::size_t n = x_.dim(0), len = x_.dim(1), out_len = len - k_ + 1;
  const std::size_t C = channels_, F = filters_;
  expect_shape(dy, {n, out_len, F}, "conv1d backward");
  Tensor dx(x_.shape);
  const double* w = kernel_.value.data.data();
  double* dw = kernel_.grad.data.data();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t t = 0; t < out_len; ++t) {
      const double* g = &dy.data[(b * out_len + t) * F];
      for (std::size_t f = 0; f < F; ++f) bias_.grad[f] += g[f];
      for (std::size_t j = 0; j < k_; ++j) {
        const std::size_t base = (b * len + t + j) * C;
        for (std::size_t c = 0; c < C; ++c) {
          const double xv = x_.data[base + c];
          const double* wr = w + (j * C + c) * F;
          double* dwr = dw + (j * C + c) * F;
          double acc = 0;
          for (std::size_t f = 0; f < F; ++f) {
            dwr[f] += xv * g[f];
            acc += wr[f] * g[f];
          }
          dx.data[base + c] += acc;
        }
      }
    }
  }
  return dx;
}

Conv2D::Conv2D(std::size_t filters, std::size_t kernel) : filters_(filters), k_(kernel) {
  if (filters == 0 || kernel == 0) throw std::invalid_argument("conv2d needs filters and kernel > 0");
}

Shape Conv2D::build(const Shape& input, Rng& rng) {
  if (input.size() != 3) {
    throw ShapeMismatch("conv2d expects [height, width, channels], got " + shape_string(input));
  }
  if (input[0] < k_ || input[1] < k_) {
    throw InputTooShort("conv2d kernel " + std::to_string(k_) + " exceeds input " +
                        shape_string(input));
  }
  channels_ = input[2];
  init_param(kernel_, {k_, k_, channels_, filters_});
  init_param(bias_, {filters_});
  glorot_uniform(kernel_.value, k_ * k_ * channels_, k_ * k_ * filters_, rng);
  return {input[0] - k_ + 1, input[1] - k_ + 1, filters_};
}

Tensor Conv2D::forward(const Tensor& x, ForwardContext&) {
  expect_rank(x, 4, "conv2d");
  if (x.dim(3) != channels_) throw ShapeMismatch("conv2d: channel count " + shape_string(x.shape));
  if (x.dim(1) < k_ || x.dim(2) < k_) throw InputTooShort("conv2d: input smaller than kernel");
  const std::size_t n = x.dim(0), H = x.dim(1), W = x.dim(2);
  const std::size_t OH = H - k_ + 1, OW = W - k_ + 1, C = channels_, F = filters_;
  Tensor y({n, OH, OW, F});
  const double* w = kernel_.value.data.data();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t r = 0; r < OH; ++r) {
      for (std::size_t s = 0; s < OW; ++s) {
        double* out = &y.data[((b * OH + r) * OW + s) * F];
        for (std::size_t f = 0; f < F; ++f) out[f] = bias_.value[f];
        for (std::size_t i = 0; i < k_; ++i) {
          for (std::size_t j = 0; j < k_; ++j) {
            const double* in = &x.data[((b * H + r + i) * W + s + j) * C];
            for (std::size_t c = 0; c < C; ++c) {
              const double xv = in[c];
              const double* wr = w + ((i * k_ + j) * C + c) * F;
              for (std::size_t f = 0; f < F; ++f) out[f] += xv * wr[f];
            }
          }
        }
      }
    }
  }
  x_ = x;
  return y;
}

Tensor Conv2D::backward(const Tensor& dy) {
  const std::size_t n = x_.dim(0), H = x_.dim(1), W = x_.dim(2);
  const std::size_t OH = H - k_ + 1, OW = W - k_ + 1, C = channels_, F = filters_;
  expect_shape(dy, {n, OH, OW, F}, "conv2d backward");
  Tensor dx(x_.shape);
  const double* w = kernel_.value.data.data();
  double* dw = kernel_.grad.data.data();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t r = 0; r < OH; ++r) {
      for (std::size_t s = 0; s < OW; ++s) {
        const double* g = &dy.data[((b * OH + r) * OW + s) * F];
        for (std::size_t f = 0; f < F; ++f) bias_.grad[f] += g[f];
        for (std::size_t i = 0; i < k_; ++i) {
          for (std::size_t j = 0; j < k_; ++j) {
            const std::size_t base = ((b * H + r + i) * W + s + j) * C;
            for (std::size_t c = 0; c < C; ++c) {
              const double xv = x_.data[base + c];
              const double* wr = w + ((i * k_ + j) * C + c) * F;
              double* dwr = dw + ((i * k_ + j) * C + c) * F;
              double acc = 0;
              for (std::size_t f = 0; f < F; ++f) {
                dwr[f] += xv * g[f];
                acc += wr[f] * g[f];
              }
              dx.data[base + c] += acc;
            }
          }
        }
      }
    }
  }
  return dx;
}

MaxPool1D::MaxPool1D(std::size_t window) : w_(window) {
  if (window == 0) throw std::invalid_argument("pool window must be positive");
}

Shape MaxPool1D::build(const Shape& input, Rng&) {
  if (input.size() != 2) throw ShapeMismatch("maxpool1d expects [length, channels]");
  if (input[0] < w_) {
    throw InputTooShort("pool window " + std::to_string(w_) + " exceeds length " +
                        std::to_string(input[0]));
  }
  return {input[0] / w_, input[1]};
}

Tensor MaxPool1D::forward(const Tensor& x, ForwardContext&) {
  expect_rank(x, 3, "maxpool1d");
  const std::size_t n = x.dim(0), len = x.dim(1), C = x.dim(2), out_len = len / w_;
  if (out_len == 0) throw InputTooShort("maxpool1d: input shorter than window");
  in_shape_ = x.shape;
  Tensor y({n, out_len, C});
  argmax_.assign(y.size(), 0);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t t = 0; t < out_len; ++t) {
      for (std::size_t c = 0; c < C; ++c) {
        std::size_t best = (b * len + t * w_) * C + c;
        for (std::size_t j = 1; j < w_; ++j) {
          const std::size_t i = (b * len + t * w_ + j) * C + c;
          if (x.data[i] > x.data[best]) best = i;
        }
        const std::size_t o = (b * out_len + t) * C + c;
        y.data[o] = x.data[best];
        argmax_[o] = best;
      }
    }
  }
  return y;
}

Tensor MaxPool1D::backward(const Tensor& dy) {
  if (dy.size() != argmax_.size()) throw ShapeMismatch("maxpool1d backward: gradient size");
  Tensor dx(in_shape_);
  for (std::size_t o = 0; o < argmax_.size(); ++o) dx.data[argmax_[o]] += dy.data[o];
  return dx;
}

MaxPool2D::MaxPool2D(std::size_t window) : w_(window) {
  if (window == 0) throw std::invalid_argument("pool window must be positive");
}

Shape MaxPool2D::build(const Shape& input, Rng&) {
  if (input.size() != 3) throw ShapeMismatch("maxpool2d expects [height, width, channels]");
  if (input[0] < w_ || input[1] < w_) {
    throw InputTooShort("pool window " + std::to_string(w_) + " exceeds input " +
                        shape_string(input));
  }
  return {input[0] / w_, input[1] / w_, input[2]};
}

Tensor MaxPool2D::forward(const Tensor& x, ForwardContext&) {
  expect_rank(x, 4, "maxpool2d");
  const std::size_t n = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
  const std::size_t OH = H / w_, OW = W / w_;
  if (OH == 0 || OW == 0) throw InputTooShort("maxpool2d: input smaller than window");
  in_shape_ = x.shape;
  Tensor y({n, OH, OW, C});
  argmax_.assign(y.size(), 0);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t r = 0; r < OH; ++r) {
      for (std::size_t s = 0; s < OW; ++s) {
        for (std::size_t c = 0; c < C; ++c) {
          std::size_t best = 0;
          double best_v = -std::numeric_limits<double>::infinity();
          bool first = true;
          for (std::size_t i = 0; i < w_; ++i) {
            for (std::size_t j = 0; j < w_; ++j) {
              const std::size_t idx = ((b * H + r * w_ + i) * W + s * w_ + j) * C + c;
              if (first || x.data[idx] > best_v) {
                best = idx;
                best_v = x.data[idx];
                first = false;
              }
            }
          }
          const std::size_t o = ((b * OH + r) * OW + s) * C + c;
          y.data[o] = best_v;
          argmax_[o] = best;
        }
      }
    }
  }
  return y;
}

Tensor MaxPool2D::backward(const Tensor& dy) {
  if (dy.size() != argmax_.size()) throw ShapeMismatch("maxpool2d backward: gradient size");
  Tensor dx(in_shape_);
  for (std::size_t o = 0; o < argmax_.size(); ++o) dx.data[argmax_[o]] += dy.data[o];
  return dx;
}

}  // namespace smellnet::nn
