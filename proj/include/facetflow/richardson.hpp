#pragma once

// Central finite differences with Richardson extrapolation, orders 1-4.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace facetflow {

namespace detail {

inline double central_difference(const std::function<double(double)>& f, double x,
                                 int order, double h) {
  switch (order) {
    case 1:
      return (f(x + h) - f(x - h)) / (2.0 * h);
    case 2:
      return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    case 3:
      return (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) /
             (2.0 * h * h * h);
    case 4:
      return (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) +
              f(x - 2.0 * h)) /
             (h * h * h * h);
    default:
      throw std::invalid_argument("central_difference: order must be 1..4");
  }
}

}  // namespace detail

// Error expansion of the central stencils is even in h, so classic
// Richardson in powers of 4 applies.  Returns the most stable diagonal entry
// (the one that moved least), which guards against round-off blowup at small h.
inline double richardson_derivative(const std::function<double(double)>& f, double x,
                                    int order, double h0, int levels = 5) {
  if (levels < 2) levels = 2;
  constexpr int kMax = 10;
  if (levels > kMax) levels = kMax;
  double table[kMax][kMax];
  double best = 0.0;
  double best_change = std::numeric_limits<double>::infinity();
  for (int i = 0; i < levels; ++i) {
    const double h = h0 / std::pow(2.0, i);
    table[i][0] = detail::central_difference(f, x, order, h);
    double pow4 = 1.0;
    for (int j = 1; j <= i; ++j) {
      pow4 *= 4.0;
      table[i][j] = (pow4 * table[i][j - 1] - table[i - 1][j - 1]) / (pow4 - 1.0);
    }
    if (i > 0) {
      const double change = std::abs(table[i][i] - table[i - 1][i - 1]);
      if (change <= best_change) {
        best_change = change;
        best = table[i][i];
      }
    } else {
      best = table[0][0];
    }
  }
  return best;
}

}  // namespace facetflow
