#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace geomgan {

inline std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

// Dense row-major array of 64-bit reals. Value semantics throughout; an
// Array is safe to share read-only across threads.
struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Array() = default;

  explicit Array(std::vector<std::size_t> s, double fill = 0.0)
      : shape(std::move(s)), data(shape_numel(shape), fill) {
    for (std::size_t d : shape)
      if (d == 0) throw std::invalid_argument("Array: zero dimension");
  }

  Array(std::vector<std::size_t> s, std::vector<double> values)
      : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != shape_numel(shape))
      throw std::invalid_argument("Array: data length does not match shape");
  }

  static Array scalar(double v) { return Array({1}, {v}); }

  static Array vec(std::vector<double> v) {
    std::size_t n = v.size();
    return Array({n}, std::move(v));
  }

  static Array matrix(std::size_t rows, std::size_t cols, std::vector<double> v) {
    return Array({rows, cols}, std::move(v));
  }

  std::size_t size() const { return data.size(); }
  bool is_scalar() const { return data.size() == 1; }

  // Batch-major convention: first dimension indexes samples.
  std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
  std::size_t cols() const { return rows() == 0 ? 0 : size() / rows(); }

  double& at(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }

  bool same_shape(const Array& other) const { return shape == other.shape; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline std::string shape_to_string(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

}  // namespace geomgan
