#pragma once

// Brute-force Legendre-Fenchel conjugate: grid maximization of
// <y,x> - sigma(x) with nested local refinement.  Serves as an independent
// oracle for the closed-form sigma_conj.

#include <array>
#include <cmath>

#include "facetflow/energy_density.hpp"
#include "facetflow/vec.hpp"

namespace facetflow {

struct BruteForceConjugate {
  double value = 0.0;
  // Set when the maximizer hit the search cube [-radius, radius]^d, which
  // means the supplied radius was too small.
  bool boundary_attained = false;
};

inline BruteForceConjugate sigma_conj_bruteforce(const EnergyDensityParams& prm,
                                                 const Vec& y, double radius,
                                                 int refinement) {
  if (!(radius > 0.0)) throw std::invalid_argument("sigma_conj_bruteforce: radius must be > 0");
  if (refinement < 1) throw std::invalid_argument("sigma_conj_bruteforce: refinement must be >= 1");
  const int d = y.dim();
  constexpr int kHalfPoints = 8;  // 17 samples per axis and level

  auto maximand = [&](const Vec& x) { return dot(y, x) - sigma(prm, x); };

  // x = 0 is always feasible and gives 0; the maximand is concave, so the
  // sampled argmax stays within one cell of the true one at every level.
  Vec center = Vec::zero(d);
  Vec best_point = center;
  double best = 0.0;
  double half_width = radius;
  bool boundary = false;

  std::array<int, kMaxDim> idx{};
  for (int level = 0; level < refinement; ++level) {
    const double h = half_width / kHalfPoints;
    idx.fill(-kHalfPoints);
    Vec level_best_point = center;
    double level_best = maximand(center);
    while (true) {
      Vec x(d);
      bool inside = true;
      for (int i = 0; i < d; ++i) {
        x[i] = center[i] + h * idx[i];
        if (std::abs(x[i]) > radius) inside = false;
      }
      if (inside) {
        const double m = maximand(x);
        if (m > level_best) {
          level_best = m;
          level_best_point = x;
        }
      }
      int axis = 0;
      while (axis < d && ++idx[axis] > kHalfPoints) {
        idx[axis] = -kHalfPoints;
        ++axis;
      }
      if (axis == d) break;
    }
    if (level_best > best) {
      best = level_best;
      best_point = level_best_point;
    }
    for (int i = 0; i < d; ++i) {
      if (std::abs(level_best_point[i]) >= radius - 0.5 * h) boundary = true;
    }
    center = level_best_point;
    half_width = 2.0 * h;  // keep a +-2 cell window around the argmax
  }

  return BruteForceConjugate{best, boundary};
}

// A search radius guaranteed to contain the conjugate's maximizer, derived
// from the stationarity condition |y| = 1 + mu t^(p-1).
inline double conjugate_search_radius(const EnergyDensityParams& prm, const Vec& y) {
  const double t = norm(y);
  if (t <= 1.0) return 2.0;
  const double argmax = std::pow((t - 1.0) / prm.mu, 1.0 / (prm.p - 1.0));
  return 2.0 * argmax + 2.0;
}

}  // namespace facetflow
