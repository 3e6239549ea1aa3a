#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace smellnet::nn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A window or kernel does not fit the input extent.
class InputTooShort : public ShapeMismatch {
 public:
  using ShapeMismatch::ShapeMismatch;
};

/// Dense row-major array of doubles. The leading axis is the batch axis
/// wherever a layer sees it.
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(Shape s, double fill = 0.0) : shape(std::move(s)), data(shape_size(shape), fill) {}
  Tensor(Shape s, std::vector<double> values);

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t axis) const { return shape.at(axis); }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  /// Same data under a new shape of equal size.
  Tensor reshaped(Shape s) const;
  void fill(double v);
};

/// Throws ShapeMismatch naming `where` when the ranks or extents differ.
void expect_shape(const Tensor& t, const Shape& expected, const char* where);
void expect_rank(const Tensor& t, std::size_t rank, const char* where);

/// Rows [begin, begin + count) along the batch axis.
Tensor batch_slice(const Tensor& x, std::size_t begin, std::size_t count);

/// The listed batch rows, in order.
Tensor gather_rows(const Tensor& x, const std::vector<std::size_t>& rows);

}  // namespace smellnet::nn
