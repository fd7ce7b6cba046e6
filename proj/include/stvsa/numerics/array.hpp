#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "stvsa/error.hpp"

namespace stvsa::num {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape &shape);
std::string shape_str(const Shape &shape);

/// Row-major dense array of doubles. Rank 1 and rank 2 cover everything in
/// this project; higher ranks are allowed but nothing constructs them.
struct DenseArray {
  Shape shape;
  std::vector<double> values;

  DenseArray() = default;
  explicit DenseArray(Shape s) : shape(std::move(s)) {
    values.assign(shape_numel(shape), 0.0);
  }
  DenseArray(Shape s, std::vector<double> v)
    : shape(std::move(s)), values(std::move(v)) {
    if (values.size() != shape_numel(shape))
      fail("shape", "value count " + std::to_string(values.size()) +
                      " does not match shape " + shape_str(shape));
  }

  static DenseArray zeros(Shape s) { return DenseArray(std::move(s)); }
  static DenseArray full(Shape s, double x) {
    DenseArray a(std::move(s));
    for (double &v : a.values) v = x;
    return a;
  }
  static DenseArray scalar(double x) { return DenseArray({1}, {x}); }

  std::size_t numel() const { return values.size(); }
  std::size_t rank() const { return shape.size(); }

  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const {
    if (shape.size() == 1) return shape[0];
    return shape.size() >= 2 ? shape[1] : 0;
  }

  double &at(std::size_t r, std::size_t c) { return values[r * shape[1] + c]; }
  double at(std::size_t r, std::size_t c) const {
    return values[r * shape[1] + c];
  }

  bool same_shape(const DenseArray &o) const { return shape == o.shape; }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void fill(double x) {
    for (double &v : values) v = x;
  }
};

/// out = a * b for row-major matrices, shapes [r,k] x [k,c] -> [r,c].
void matmul_into(const DenseArray &a, const DenseArray &b, DenseArray &out);

} // namespace stvsa::num
