#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace facetflow {

// Points and gradient values live in low ambient dimension, so Vec keeps a
// fixed inline buffer instead of heap storage.
inline constexpr int kMaxDim = 8;

class Vec {
 public:
  Vec() = default;

  explicit Vec(int dim, double fill = 0.0) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) {
      throw std::invalid_argument("Vec: dimension out of range");
    }
    for (int i = 0; i < dim_; ++i) c_[i] = fill;
  }

  Vec(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
    if (dim_ < 1 || dim_ > kMaxDim) {
      throw std::invalid_argument("Vec: dimension out of range");
    }
    int i = 0;
    for (double x : xs) c_[i++] = x;
  }

  static Vec zero(int dim) { return Vec(dim); }

  int dim() const { return dim_; }

  double operator[](int i) const { return c_[i]; }
  double& operator[](int i) { return c_[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vec& operator*=(double a) {
    for (int i = 0; i < dim_; ++i) c_[i] *= a;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 1;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline bool is_finite(const Vec& a) {
  for (int i = 0; i < a.dim(); ++i) {
    if (!std::isfinite(a[i])) return false;
  }
  return true;
}

}  // namespace facetflow
