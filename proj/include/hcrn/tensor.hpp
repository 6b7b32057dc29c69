#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "hcrn/errors.hpp"

namespace hcrn {

template <typename S>
struct dtype_name;
template <>
struct dtype_name<float> {
  static constexpr const char* value = "f32";
};
template <>
struct dtype_name<double> {
  static constexpr const char* value = "f64";
};

// Dense row-major tensor. Shapes stay desk-scale (<= a few hundred per axis),
// so there are no views, strides or broadcasting beyond same-shape.
template <typename S>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<S> v;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s)
      : shape(std::move(s)), v(numel_of(shape), S(0)) {}

  static std::size_t numel_of(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t e : s) n *= e;
    return n;
  }

  static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }

  static Tensor vec(std::initializer_list<S> xs) {
    Tensor t;
    t.shape = {xs.size()};
    t.v.assign(xs.begin(), xs.end());
    return t;
  }

  static Tensor scalar(S x) {
    Tensor t({1});
    t.v[0] = x;
    return t;
  }

  std::size_t numel() const { return v.size(); }
  std::size_t ndim() const { return shape.size(); }

  std::size_t rows() const { return shape[0]; }
  std::size_t cols() const { return shape[1]; }

  S& operator[](std::size_t i) { return v[i]; }
  const S& operator[](std::size_t i) const { return v[i]; }

  S& at2(std::size_t i, std::size_t j) { return v[i * shape[1] + j]; }
  const S& at2(std::size_t i, std::size_t j) const { return v[i * shape[1] + j]; }

  void fill(S x) { std::fill(v.begin(), v.end(), x); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  std::string shape_str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape[i]);
    }
    return s + ")";
  }
};

template <typename S>
bool all_finite(const Tensor<S>& t) {
  for (S x : t.v)
    if (!std::isfinite(static_cast<double>(x))) return false;
  return true;
}

}  // namespace hcrn
