#pragma once

// Pointwise calculus for the singular energy density
//   sigma(y) = |y| + (mu/p) |y|^p,   mu > 0, p in (1, inf),
// its convex conjugate, both subdifferentials and the proximal map.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "facetflow/errors.hpp"
#include "facetflow/vec.hpp"

namespace facetflow {

// Below this magnitude a gradient value is treated as zero when branching
// between the smooth and the set-valued part of the subdifferential.  Avoids
// catastrophic |x|^(p-2) x evaluations for p < 2.
inline constexpr double kGradientZeroTol = 1e-14;

struct EnergyDensityParams {
  double mu = 1.0;
  double p = 2.0;
  int dim = 1;

  EnergyDensityParams() = default;
  EnergyDensityParams(double mu_, double p_, int dim_) : mu(mu_), p(p_), dim(dim_) {
    validate();
  }

  void validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("EnergyDensityParams: mu must be > 0");
    if (!(p > 1.0) || !std::isfinite(p)) {
      throw std::invalid_argument("EnergyDensityParams: p must be in (1, inf)");
    }
    if (dim < 1 || dim > kMaxDim) {
      throw std::invalid_argument("EnergyDensityParams: dim out of range");
    }
  }

  // Hoelder-conjugate exponent q with 1/p + 1/q = 1.
  double conjugate_exponent() const { return p / (p - 1.0); }
};

// sigma as a function of the modulus; shared by the vector overload and the
// 1-D grid code where gradients are scalars.
inline double sigma_of_modulus(const EnergyDensityParams& prm, double t) {
  return t + prm.mu / prm.p * std::pow(t, prm.p);
}

inline double sigma(const EnergyDensityParams& prm, const Vec& y) {
  if (!is_finite(y)) throw std::invalid_argument("sigma: non-finite input");
  return sigma_of_modulus(prm, norm(y));
}

inline double sigma_scalar(const EnergyDensityParams& prm, double w) {
  return sigma_of_modulus(prm, std::abs(w));
}

inline double sigma_conj_of_modulus(const EnergyDensityParams& prm, double t) {
  if (t <= 1.0) return 0.0;
  const double q = prm.p / (prm.p - 1.0);
  return (1.0 - 1.0 / prm.p) * std::pow(prm.mu, -1.0 / (prm.p - 1.0)) *
         std::pow(t - 1.0, q);
}

inline double sigma_conj(const EnergyDensityParams& prm, const Vec& y) {
  if (!is_finite(y)) throw std::invalid_argument("sigma_conj: non-finite input");
  return sigma_conj_of_modulus(prm, norm(y));
}

inline double sigma_conj_scalar(const EnergyDensityParams& prm, double w) {
  return sigma_conj_of_modulus(prm, std::abs(w));
}

// The subdifferentials of sigma and sigma^# only ever produce two shapes:
// a single point, or the closed unit ball (at the kink of sigma).
class SubdiffValue {
 public:
  enum class Kind { kSingleton, kClosedUnitBall };

  static SubdiffValue singleton(Vec v) { return SubdiffValue(Kind::kSingleton, v); }
  static SubdiffValue closed_unit_ball(int dim) {
    return SubdiffValue(Kind::kClosedUnitBall, Vec::zero(dim));
  }

  Kind kind() const { return kind_; }
  bool is_singleton() const { return kind_ == Kind::kSingleton; }

  const Vec& value() const {
    if (!is_singleton()) {
      throw std::logic_error("SubdiffValue: closed unit ball has no single value");
    }
    return value_;
  }

  int dim() const { return value_.dim(); }

  // Euclidean distance from g to the set.
  double distance_to(const Vec& g) const {
    if (is_singleton()) return norm(g - value_);
    return std::max(0.0, norm(g) - 1.0);
  }

  bool contains(const Vec& g, double tol) const { return distance_to(g) <= tol; }

 private:
  SubdiffValue(Kind k, Vec v) : kind_(k), value_(v) {}

  Kind kind_;
  Vec value_;
};

inline SubdiffValue subdiff_sigma(const EnergyDensityParams& prm, const Vec& x) {
  if (!is_finite(x)) throw std::invalid_argument("subdiff_sigma: non-finite input");
  const double t = norm(x);
  if (t < kGradientZeroTol) return SubdiffValue::closed_unit_ball(x.dim());
  return SubdiffValue::singleton(x * (1.0 / t + prm.mu * std::pow(t, prm.p - 2.0)));
}

inline SubdiffValue subdiff_sigma_conj(const EnergyDensityParams& prm, const Vec& y) {
  if (!is_finite(y)) throw std::invalid_argument("subdiff_sigma_conj: non-finite input");
  const double t = norm(y);
  if (t <= 1.0) return SubdiffValue::singleton(Vec::zero(y.dim()));
  const double scale =
      std::pow(prm.mu, -1.0 / (prm.p - 1.0)) * std::pow(t - 1.0, 1.0 / (prm.p - 1.0)) / t;
  return SubdiffValue::singleton(y * scale);
}

// 1-D specializations used edge-wise by the grid code.
inline double subdiff_sigma_scalar(const EnergyDensityParams& prm, double w) {
  // caller must have |w| >= kGradientZeroTol
  const double s = w > 0.0 ? 1.0 : -1.0;
  return s * (1.0 + prm.mu * std::pow(std::abs(w), prm.p - 1.0));
}

inline double distance_to_subdiff_scalar(const EnergyDensityParams& prm, double w,
                                         double g) {
  if (std::abs(w) < kGradientZeroTol) return std::max(0.0, std::abs(g) - 1.0);
  return std::abs(g - subdiff_sigma_scalar(prm, w));
}

namespace detail {

// Solves t + lambda*mu*t^(p-1) + lambda = a on (0, a) for a > lambda.
// phi is strictly increasing with one-signed curvature, so bracketed Newton
// converges after at most one overshoot, with bisection as the safeguard.
// The residual is judged against the equation's magnitude at the current
// iterate; endpoint-based scales would be astronomically loose for large p,
// and step-based stops fail for p < 2 where phi has unbounded slope at 0.
inline double prox_radius(double mu, double p, double lambda, double a) {
  double lo = 0.0, hi = a;
  double t = std::max(a - lambda, 0.5 * a);
  double best_t = t;
  double best_f = std::numeric_limits<double>::infinity();
  double best_local = a;
  for (int it = 0; it < 200; ++it) {
    const double term = lambda * mu * std::pow(t, p - 1.0);
    const double f = t + term + lambda - a;
    const double local = t + term + lambda + a;
    if (std::abs(f) <= 5e-16 * local) return t;
    if (std::abs(f) < best_f) {
      best_f = std::abs(f);
      best_t = t;
      best_local = local;
    }
    if (f > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    const double d = 1.0 + lambda * mu * (p - 1.0) * std::pow(t, p - 2.0);
    double t_next = t - f / d;
    if (!(t_next > lo) || !(t_next < hi)) t_next = 0.5 * (lo + hi);
    if (t_next == t) break;  // bracket resolved to the last bit
    t = t_next;
  }
  if (best_f <= 1e-12 * best_local) return best_t;
  throw SolverError("prox_sigma: radial root-find did not converge", best_f);
}

}  // namespace detail

// Resolvent (I + lambda d(sigma))^{-1}: the unique minimizer of
// lambda*sigma(w) + |w - z|^2 / 2.
inline Vec prox_sigma(const EnergyDensityParams& prm, double lambda, const Vec& z) {
  if (!(lambda > 0.0)) throw std::invalid_argument("prox_sigma: lambda must be > 0");
  if (!is_finite(z)) throw std::invalid_argument("prox_sigma: non-finite input");
  const double a = norm(z);
  if (a <= lambda) return Vec::zero(z.dim());
  double t;
  if (prm.p == 2.0) {
    t = (a - lambda) / (1.0 + lambda * prm.mu);
  } else {
    t = detail::prox_radius(prm.mu, prm.p, lambda, a);
  }
  return z * (t / a);
}

inline double prox_sigma_scalar(const EnergyDensityParams& prm, double lambda, double z) {
  const double a = std::abs(z);
  if (a <= lambda) return 0.0;
  double t;
  if (prm.p == 2.0) {
    t = (a - lambda) / (1.0 + lambda * prm.mu);
  } else {
    t = detail::prox_radius(prm.mu, prm.p, lambda, a);
  }
  return z > 0.0 ? t : -t;
}

// Residual of the inclusion g in dsigma(w) through the resolvent identity
// w = prox_sigma(w + g).  Unlike the raw set distance this stays small when
// (w, g) is merely close to the graph of dsigma, which is all an iterative
// solver can deliver near the kink at w = 0.
inline double subdiff_graph_residual_scalar(const EnergyDensityParams& prm, double w,
                                            double g) {
  return std::abs(w - prox_sigma_scalar(prm, 1.0, w + g));
}

}  // namespace facetflow
