#pragma once

// Straightforward reference computations used to cross-check the layers.

#include <cmath>
#include <vector>

#include "smellnet/nn/tensor.hpp"

namespace oracle {

using smellnet::nn::Tensor;

inline Tensor conv1d(const Tensor& x, const Tensor& k, const Tensor& bias) {
  const std::size_t n = x.shape[0], L = x.shape[1], C = x.shape[2];
  const std::size_t K = k.shape[0], F = k.shape[2], out = L - K + 1;
  Tensor y({n, out, F});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t t = 0; t < out; ++t)
      for (std::size_t f = 0; f < F; ++f) {
        double s = bias.data[f];
        for (std::size_t j = 0; j < K; ++j)
          for (std::size_t c = 0; c < C; ++c)
            s += x.data[(b * L + t + j) * C + c] * k.data[(j * C + c) * F + f];
        y.data[(b * out + t) * F + f] = s;
      }
  return y;
}

inline Tensor conv2d(const Tensor& x, const Tensor& k, const Tensor& bias) {
  const std::size_t n = x.shape[0], H = x.shape[1], W = x.shape[2], C = x.shape[3];
  const std::size_t K = k.shape[0], F = k.shape[3];
  const std::size_t OH = H - K + 1, OW = W - K + 1;
  Tensor y({n, OH, OW, F});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t r = 0; r < OH; ++r)
      for (std::size_t s = 0; s < OW; ++s)
        for (std::size_t f = 0; f < F; ++f) {
          double acc = bias.data[f];
          for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < K; ++j)
              for (std::size_t c = 0; c < C; ++c)
                acc += x.data[((b * H + r + i) * W + s + j) * C + c] *
                       k.data[((i * K + j) * C + c) * F + f];
          y.data[((b * OH + r) * OW + s) * F + f] = acc;
        }
  return y;
}

inline Tensor maxpool1d(const Tensor& x, std::size_t w) {
  const std::size_t n = x.shape[0], L = x.shape[1], C = x.shape[2], out = L / w;
  Tensor y({n, out, C});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t t = 0; t < out; ++t)
      for (std::size_t c = 0; c < C; ++c) {
        double m = x.data[(b * L + t * w) * C + c];
        for (std::size_t j = 0; j < w; ++j) m = std::max(m, x.data[(b * L + t * w + j) * C + c]);
        y.data[(b * out + t) * C + c] = m;
      }
  return y;
}

inline Tensor maxpool2d(const Tensor& x, std::size_t w) {
  const std::size_t n = x.shape[0], H = x.shape[1], W = x.shape[2], C = x.shape[3];
  const std::size_t OH = H / w, OW = W / w;
  Tensor y({n, OH, OW, C});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t r = 0; r < OH; ++r)
      for (std::size_t s = 0; s < OW; ++s)
        for (std::size_t c = 0; c < C; ++c) {
          double m = -INFINITY;
          for (std::size_t i = 0; i < w; ++i)
            for (std::size_t j = 0; j < w; ++j)
              m = std::max(m, x.data[((b * H + r * w + i) * W + s * w + j) * C + c]);
          y.data[((b * OH + r) * OW + s) * C + c] = m;
        }
  return y;
}

inline double sigm(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// One LSTM step from zero state, written gate by gate.
inline std::vector<double> lstm_step(const std::vector<double>& x, const Tensor& W, const Tensor& R,
                                     const Tensor& bias, std::vector<double> h,
                                     std::vector<double> c) {
  const std::size_t E = x.size(), U = h.size();
  std::vector<double> out(U);
  auto pre = [&](std::size_t gate, std::size_t u) {
    double s = bias.data[gate * U + u];
    for (std::size_t e = 0; e < E; ++e) s += x[e] * W.data[e * 4 * U + gate * U + u];
    for (std::size_t v = 0; v < U; ++v) s += h[v] * R.data[v * 4 * U + gate * U + u];
    return s;
  };
  for (std::size_t u = 0; u < U; ++u) {
    const double i = sigm(pre(0, u));
    const double f = sigm(pre(1, u));
    const double g = std::tanh(pre(2, u));
    const double o = sigm(pre(3, u));
    const double cn = f * c[u] + i * g;
    out[u] = o * std::tanh(cn);
  }
  return out;
}

}  // namespace oracle
