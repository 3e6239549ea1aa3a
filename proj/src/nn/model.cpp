#include "smellnet/nn/model.hpp"

#include <algorithm>
#include <cmath>

namespace smellnet::nn {

void Sequential::add(std::unique_ptr<Layer> layer) {
  if (built_) throw std::logic_error("cannot add layers to a built model");
  layers_.push_back(std::move(layer));
}

Shape Sequential::build(const Shape& sample_shape, std::uint64_t seed) {
  Rng rng(seed);
  Shape shape = sample_shape;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    shape = layers_[i]->build(shape, rng);
    const std::string prefix = layers_[i]->kind() + "_" + std::to_string(i) + "/";
    for (Param* p : layers_[i]->params()) p->name = prefix + p->name;
  }
  input_shape_ = sample_shape;
  output_shape_ = shape;
  built_ = true;
  return shape;
}

Tensor Sequential::forward(const Tensor& x, Mode mode, Rng* rng) {
  if (!built_) throw std::logic_error("model used before build");
  if (x.rank() != input_shape_.size() + 1 ||
      !std::equal(input_shape_.begin(), input_shape_.end(), x.shape.begin() + 1)) {
    throw ShapeMismatch("model input " + shape_string(x.shape) + " does not match " +
                        shape_string(input_shape_));
  }
  ForwardContext ctx;
  ctx.mode = mode;
  ctx.rng = rng;
  Tensor h = x;
  for (auto& layer : layers_) h = layer->forward(h, ctx);
  return h;
}

Tensor Sequential::backward(const Tensor& dy) {
  Tensor g = dy;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

void Sequential::zero_grad() {
  for (Param* p : params()) p->grad.fill(0.0);
}

std::vector<Param*> Sequential::params() {
  std::vector<Param*> out;
  for (auto& layer : layers_) {
    for (Param* p : layer->params()) out.push_back(p);
  }
  return out;
}

std::size_t Sequential::parameter_count(bool trainable_only) {
  std::size_t n = 0;
  for (Param* p : params()) {
    if (p->trainable || !trainable_only) n += p->value.size();
  }
  return n;
}

std::vector<double> Sequential::predict(const Tensor& x, std::size_t batch) {
  std::vector<double> out;
  const std::size_t n = x.dim(0);
  out.reserve(n);
  for (std::size_t begin = 0; begin < n; begin += batch) {
    const std::size_t count = std::min(batch, n - begin);
    const Tensor y = forward(batch_slice(x, begin, count), Mode::infer);
    out.insert(out.end(), y.data.begin(), y.data.end());
  }
  return out;
}

std::vector<Tensor> Sequential::snapshot() {
  std::vector<Tensor> out;
  for (Param* p : params()) out.push_back(p->value);
  return out;
}

void Sequential::restore(const std::vector<Tensor>& values) {
  auto ps = params();
  if (values.size() != ps.size()) throw ShapeMismatch("snapshot does not match model");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    expect_shape(values[i], ps[i]->value.shape, "restore");
    ps[i]->value = values[i];
  }
}

double bce_loss(const std::vector<double>& p, const std::vector<double>& y) {
  if (p.size() != y.size() || p.empty()) throw ShapeMismatch("bce: prediction/label size");
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = std::clamp(p[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    sum += y[i] * std::log(q) + (1.0 - y[i]) * std::log(1.0 - q);
  }
  return -sum / static_cast<double>(p.size());
}

std::vector<double> bce_grad(const std::vector<double>& p, const std::vector<double>& y) {
  if (p.size() != y.size() || p.empty()) throw ShapeMismatch("bce: prediction/label size");
  std::vector<double> g(p.size(), 0.0);
  const double n = static_cast<double>(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < kProbabilityClamp || p[i] > 1.0 - kProbabilityClamp) continue;
    g[i] = (p[i] - y[i]) / (p[i] * (1.0 - p[i])) / n;
  }
  return g;
}

void Adam::step(const std::vector<Param*>& params) {
  if (state_.first_moment.empty()) {
    for (Param* p : params) {
      state_.first_moment.emplace_back(p->value.shape);
      state_.second_moment.emplace_back(p->value.shape);
    }
  }
  if (state_.first_moment.size() != params.size()) {
    throw std::logic_error("optimizer used with a different parameter list");
  }
  ++state_.step;
  const double t = static_cast<double>(state_.step);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    if (!p.trainable) continue;
    auto& m = state_.first_moment[k].data;
    auto& v = state_.second_moment[k].data;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad.data[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p.value.data[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

GradCheckResult grad_check(Sequential& model, const Tensor& x, const std::vector<double>& y,
                           double eps, std::uint64_t seed, bool include_inputs) {
  auto loss_at = [&](const Tensor& input) {
    Rng rng(seed);
    const Tensor out = model.forward(input, Mode::train, &rng);
    return bce_loss(out.data, y);
  };

  model.zero_grad();
  Rng rng(seed);
  const Tensor out = model.forward(x, Mode::train, &rng);
  const Tensor dx = model.backward(Tensor(out.shape, bce_grad(out.data, y)));

  GradCheckResult result;
  auto compare = [&](double analytic, double numeric, const std::string& where) {
    const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
    const double err = std::fabs(analytic - numeric) / denom;
    ++result.checked;
    if (err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst = where;
    }
  };

  for (Param* p : model.params()) {
    if (!p->trainable) continue;
    const Tensor analytic = p->grad;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double saved = p->value.data[i];
      p->value.data[i] = saved + eps;
      const double up = loss_at(x);
      p->value.data[i] = saved - eps;
      const double down = loss_at(x);
      p->value.data[i] = saved;
      compare(analytic.data[i], (up - down) / (2 * eps), p->name + "[" + std::to_string(i) + "]");
    }
  }
  if (include_inputs) {
    Tensor probe = x;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const double saved = probe.data[i];
      probe.data[i] = saved + eps;
      const double up = loss_at(probe);
      probe.data[i] = saved - eps;
      const double down = loss_at(probe);
      probe.data[i] = saved;
      compare(dx.data[i], (up - down) / (2 * eps), "input[" + std::to_string(i) + "]");
    }
  }
  return result;
}

}  // namespace smellnet::nn
