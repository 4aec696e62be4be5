#pragma once

// A scalar function bundled with its first four derivatives, the common
// currency of the radial machinery (surface profiles, facet extensions,
// ODE basis functions).

#include <cmath>
#include <functional>

#include "facetflow/richardson.hpp"

namespace facetflow {

struct SmoothFn {
  std::function<double(double)> f;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> d3;
  std::function<double(double)> d4;
};

// s^a with exact derivatives.
inline SmoothFn power_fn(double a) {
  return SmoothFn{
      [a](double s) { return std::pow(s, a); },
      [a](double s) { return a * std::pow(s, a - 1.0); },
      [a](double s) { return a * (a - 1.0) * std::pow(s, a - 2.0); },
      [a](double s) { return a * (a - 1.0) * (a - 2.0) * std::pow(s, a - 3.0); },
      [a](double s) { return a * (a - 1.0) * (a - 2.0) * (a - 3.0) * std::pow(s, a - 4.0); },
  };
}

inline SmoothFn s_log_s_fn() {
  return SmoothFn{
      [](double s) { return s * std::log(s); },
      [](double s) { return std::log(s) + 1.0; },
      [](double s) { return 1.0 / s; },
      [](double s) { return -1.0 / (s * s); },
      [](double s) { return 2.0 / (s * s * s); },
  };
}

// Wraps a plain callable, supplying derivatives by Richardson-extrapolated
// central differences.
inline SmoothFn smooth_fn_from_values(std::function<double(double)> f, double h0) {
  SmoothFn out;
  out.f = f;
  out.d1 = [f, h0](double s) { return richardson_derivative(f, s, 1, h0); };
  out.d2 = [f, h0](double s) { return richardson_derivative(f, s, 2, h0); };
  out.d3 = [f, h0](double s) { return richardson_derivative(f, s, 3, h0); };
  out.d4 = [f, h0](double s) { return richardson_derivative(f, s, 4, h0); };
  return out;
}

}  // namespace facetflow
