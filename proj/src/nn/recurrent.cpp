#include <cmath>

#include "init.hpp"
#include "smellnet/nn/layers.hpp"

namespace smellnet::nn {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

std::vector<double> dropout_scales(std::size_t count, double rate, Rng& rng) {
  std::vector<double> s(count);
  const double keep = 1.0 / (1.0 - rate);
  for (auto& v : s) v = rng.bernoulli(rate) ? 0.0 : keep;
  return s;
}

}  // namespace

Embedding::Embedding(std::size_t vocab, std::size_t dim, bool mask_zero)
    : vocab_(vocab), dim_(dim), mask_zero_(mask_zero) {
  if (vocab == 0 || dim == 0) throw std::invalid_argument("embedding needs vocab and dim > 0");
}

Shape Embedding::build(const Shape& input, Rng& rng) {
  if (input.size() != 1) throw ShapeMismatch("embedding expects [length], got " + shape_string(input));
  init_param(table_, {vocab_, dim_});
  for (auto& v : table_.value.data) v = rng.uniform(-0.05, 0.05);
  return {input[0], dim_};
}

Tensor Embedding::forward(const Tensor& x, ForwardContext& ctx) {
  expect_rank(x, 2, "embedding");
  const std::size_t n = x.dim(0), len = x.dim(1);
  in_shape_ = x.shape;
  ids_.resize(x.size());
  Tensor y({n, len, dim_});
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double raw = x.data[i];
    if (!(raw >= 0.0) || raw >= static_cast<double>(vocab_)) {
      throw std::out_of_range("token id outside embedding table: " + std::to_string(raw));
    }
    ids_[i] = static_cast<std::size_t>(std::llround(raw));
    const double* row = &table_.value.data[ids_[i] * dim_];
    std::copy(row, row + dim_, &y.data[i * dim_]);
  }
  if (mask_zero_) {
    ctx.mask.assign(x.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) ctx.mask[i] = ids_[i] != 0;
    ctx.mask_steps = len;
  }
  return y;
}

Tensor Embedding::backward(const Tensor& dy) {
  expect_shape(dy, {in_shape_[0], in_shape_[1], dim_}, "embedding backward");
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    double* g = &table_.grad.data[ids_[i] * dim_];
    for (std::size_t e = 0; e < dim_; ++e) g[e] += dy.data[i * dim_ + e];
  }
  return Tensor(in_shape_);
}

LSTM::LSTM(std::size_t units, bool return_sequences, double dropout, double recurrent_dropout)
    : units_(units),
      return_sequences_(return_sequences),
      dropout_(dropout),
      recurrent_dropout_(recurrent_dropout) {
  if (units == 0) throw std::invalid_argument("lstm needs at least one unit");
  if (!(dropout >= 0.0 && dropout < 1.0) || !(recurrent_dropout >= 0.0 && recurrent_dropout < 1.0)) {
    throw std::invalid_argument("lstm dropout rates must lie in [0, 1)");
  }
}

Shape LSTM::build(const Shape& input, Rng& rng) {
  if (input.size() != 2) throw ShapeMismatch("lstm expects [steps, features], got " + shape_string(input));
  in_ = input[1];
  const std::size_t G = 4 * units_;
  init_param(kernel_, {in_, G});
  init_param(recurrent_, {units_, G});
  init_param(bias_, {G});
  glorot_uniform(kernel_.value, in_, G, rng);
  glorot_uniform(recurrent_.value, units_, G, rng);
  for (std::size_t u = 0; u < units_; ++u) bias_.value[units_ + u] = 1.0;
  if (return_sequences_) return {input[0], units_};
  return {units_};
}

Tensor LSTM::forward(const Tensor& x, ForwardContext& ctx) {
  expect_rank(x, 3, "lstm");
  if (x.dim(2) != in_) throw ShapeMismatch("lstm: feature width " + shape_string(x.shape));
  const std::size_t n = x.dim(0), T = x.dim(1), E = in_, U = units_, G = 4 * U;
  n_ = n;
  steps_ = T;

  valid_.assign(n * T, 1);
  if (ctx.has_mask()) {
    if (ctx.mask_steps != T || ctx.mask.size() != n * T) throw ShapeMismatch("lstm: mask shape");
    valid_ = ctx.mask;
  }
  const bool training = ctx.mode == Mode::train;
  if (training && (dropout_ > 0 || recurrent_dropout_ > 0) && !ctx.rng) {
    throw std::logic_error("lstm dropout in training mode needs a generator");
  }
  x_drop_ = training && dropout_ > 0 ? dropout_scales(n * E, dropout_, *ctx.rng)
                                     : std::vector<double>(n * E, 1.0);
  h_drop_ = training && recurrent_dropout_ > 0 ? dropout_scales(n * U, recurrent_dropout_, *ctx.rng)
                                               : std::vector<double>(n * U, 1.0);

  xin_.assign(T, std::vector<double>(n * E, 0.0));
  hin_.assign(T, std::vector<double>(n * U, 0.0));
  gates_.assign(T, std::vector<double>(n * G, 0.0));
  c_.assign(T, std::vector<double>(n * U, 0.0));
  c_prev_.assign(T, std::vector<double>(n * U, 0.0));

  std::vector<double> h(n * U, 0.0), c(n * U, 0.0), z(G);
  Tensor y = return_sequences_ ? Tensor({n, T, U}) : Tensor({n, U});
  const double* W = kernel_.value.data.data();
  const double* R = recurrent_.value.data.data();

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t b = 0; b < n; ++b) {
      if (valid_[b * T + t]) {
        double* xin = &xin_[t][b * E];
        double* hin = &hin_[t][b * U];
        for (std::size_t e = 0; e < E; ++e) xin[e] = x.data[(b * T + t) * E + e] * x_drop_[b * E + e];
        for (std::size_t u = 0; u < U; ++u) hin[u] = h[b * U + u] * h_drop_[b * U + u];
        for (std::size_t q = 0; q < G; ++q) z[q] = bias_.value[q];
        for (std::size_t e = 0; e < E; ++e) {
          const double v = xin[e];
          const double* row = W + e * G;
          for (std::size_t q = 0; q < G; ++q) z[q] += v * row[q];
        }
        for (std::size_t u = 0; u < U; ++u) {
          const double v = hin[u];
          const double* row = R + u * G;
          for (std::size_t q = 0; q < G; ++q) z[q] += v * row[q];
        }
        double* gate = &gates_[t][b * G];
        for (std::size_t u = 0; u < U; ++u) {
          const double ig = sigmoid(z[u]);
          const double fg = sigmoid(z[U + u]);
          const double gg = std::tanh(z[2 * U + u]);
          const double og = sigmoid(z[3 * U + u]);
          gate[u] = ig;
          gate[U + u] = fg;
          gate[2 * U + u] = gg;
          gate[3 * U + u] = og;
          const std::size_t s = b * U + u;
          c_prev_[t][s] = c[s];
          c[s] = fg * c[s] + ig * gg;
          c_[t][s] = c[s];
          h[s] = og * std::tanh(c[s]);
        }
      }
      if (return_sequences_) {
        std::copy(&h[b * U], &h[b * U] + U, &y.data[(b * T + t) * U]);
      }
    }
  }
  if (!return_sequences_) {
    y.data = h;
    ctx.mask.clear();
    ctx.mask_steps = 0;
  }
  return y;
}

Tensor LSTM::backward(const Tensor& dy) {
  const std::size_t n = n_, T = steps_, E = in_, U = units_, G = 4 * U;
  if (return_sequences_) {
    expect_shape(dy, {n, T, U}, "lstm backward");
  } else {
    expect_shape(dy, {n, U}, "lstm backward");
  }
  Tensor dx({n, T, E});
  std::vector<double> dh(n * U, 0.0), dc(n * U, 0.0), dz(G);
  if (!return_sequences_) dh = dy.data;
  const double* W = kernel_.value.data.data();
  const double* R = recurrent_.value.data.data();
  double* dW = kernel_.grad.data.data();
  double* dR = recurrent_.grad.data.data();

  for (std::size_t t = T; t-- > 0;) {
    for (std::size_t b = 0; b < n; ++b) {
      double* dhb = &dh[b * U];
      double* dcb = &dc[b * U];
      if (return_sequences_) {
        for (std::size_t u = 0; u < U; ++u) dhb[u] += dy.data[(b * T + t) * U + u];
      }
      if (!valid_[b * T + t]) continue;
      const double* gate = &gates_[t][b * G];
      for (std::size_t u = 0; u < U; ++u) {
        const double ig = gate[u], fg = gate[U + u], gg = gate[2 * U + u], og = gate[3 * U + u];
        const double tc = std::tanh(c_[t][b * U + u]);
        const double dct = dcb[u] + dhb[u] * og * (1.0 - tc * tc);
        dz[u] = dct * gg * ig * (1.0 - ig);
        dz[U + u] = dct * c_prev_[t][b * U + u] * fg * (1.0 - fg);
        dz[2 * U + u] = dct * ig * (1.0 - gg * gg);
        dz[3 * U + u] = dhb[u] * tc * og * (1.0 - og);
        dcb[u] = dct * fg;
      }
      for (std::size_t q = 0; q < G; ++q) bias_.grad[q] += dz[q];
      const double* xin = &xin_[t][b * E];
      for (std::size_t e = 0; e < E; ++e) {
        const double* row = W + e * G;
        double* drow = dW + e * G;
        double acc = 0;
        for (std::size_t q = 0; q < G; ++q) {
          drow[q] += xin[e] * dz[q];
          acc += row[q] * dz[q];
        }
        dx.data[(b * T + t) * E + e] = acc * x_drop_[b * E + e];
      }
      const double* hin = &hin_[t][b * U];
      for (std::size_t u = 0; u < U; ++u) {
        const double* row = R + u * G;
        double* drow = dR + u * G;
        double acc = 0;
        for (std::size_t q = 0; q < G; ++q) {
          drow[q] += hin[u] * dz[q];
          acc += row[q] * dz[q];
        }
        dhb[u] = acc * h_drop_[b * U + u];
      }
    }
  }
  return dx;
}

}  // namespace smellnet::nn
