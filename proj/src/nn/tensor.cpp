#include "smellnet/nn/tensor.hpp"

#include <algorithm>

namespace smellnet::nn {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
  if (data.size() != shape_size(shape)) {
    throw ShapeMismatch("tensor data length " + std::to_string(data.size()) +
                        " does not match shape " + shape_string(shape));
  }
}

Tensor Tensor::reshaped(Shape s) const {
  if (shape_size(s) != data.size()) {
    throw ShapeMismatch("cannot reshape " + shape_string(shape) + " to " + shape_string(s));
  }
  return Tensor(std::move(s), data);
}

void Tensor::fill(double v) { std::fill(data.begin(), data.end(), v); }

void expect_shape(const Tensor& t, const Shape& expected, const char* where) {
  if (t.shape != expected) {
    throw ShapeMismatch(std::string(where) + ": expected " + shape_string(expected) + ", got " +
                        shape_string(t.shape));
  }
}

void expect_rank(const Tensor& t, std::size_t rank, const char* where) {
  if (t.rank() != rank) {
    throw ShapeMismatch(std::string(where) + ": expected rank " + std::to_string(rank) + ", got " +
                        shape_string(t.shape));
  }
}

Tensor batch_slice(const Tensor& x, std::size_t begin, std::size_t count) {
  if (x.rank() == 0 || begin + count > x.dim(0)) throw ShapeMismatch("batch slice out of range");
  Shape s = x.shape;
  s[0] = count;
  const std::size_t row = x.size() / x.dim(0);
  return Tensor(std::move(s), std::vector<double>(x.data.begin() + static_cast<std::ptrdiff_t>(begin * row),
                                                  x.data.begin() + static_cast<std::ptrdiff_t>((begin + count) * row)));
}

Tensor gather_rows(const Tensor& x, const std::vector<std::size_t>& rows) {
  if (x.rank() == 0) throw ShapeMismatch("gather needs a batch axis");
  Shape s = x.shape;
  s[0] = rows.size();
  Tensor out(std::move(s));
  const std::size_t row = x.dim(0) ? x.size() / x.dim(0) : 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= x.dim(0)) throw ShapeMismatch("gather row out of range");
    std::copy(x.data.begin() + static_cast<std::ptrdiff_t>(rows[i] * row),
              x.data.begin() + static_cast<std::ptrdiff_t>((rows[i] + 1) * row),
              out.data.begin() + static_cast<std::ptrdiff_t>(i * row));
  }
  return out;
}

}  // namespace smellnet::nn
