#pragma once

// Spherically symmetric surfaces f(x) = h(|x|) on the ball of radius r with a
// flat facet of radius r0, and the composite field
//   H(s) = -1 + mu |h'(s)|^(p-2) h'(s)
// together with its first three derivatives.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>

#include "facetflow/energy_density.hpp"
#include "facetflow/smooth_fn.hpp"

namespace facetflow {

// Degenerate facets are rejected; the restriction machinery needs 0 < r0 < r.
inline constexpr double kMinFacetFraction = 1e-6;

struct RadialProfile {
  double r0 = 0.0;
  double r = 0.0;
  EnergyDensityParams params;
  SmoothFn h;  // glued: constant on [0, r0], strictly decreasing on (r0, r)

  // Analytic continuation of the bulk branch of h', when available.  Allows
  // finite-difference cross checks of derivatives at s = r0 itself.
  std::function<double(double)> bulk_slope;

  // Set by factories whose construction aims to cancel the boundary-sphere
  // term of the canonical restriction.
  bool expect_zero_surface_term = false;
};

inline void validate_facet_radii(double r0, double r) {
  if (!(r0 > 0.0) || !(r > r0)) {
    throw std::invalid_argument("radial profile: need 0 < r0 < r");
  }
  if (r0 < kMinFacetFraction * r) {
    throw std::invalid_argument("radial profile: facet radius r0 below 1e-6 * r");
  }
}

namespace detail {

// psi(u) = mu |u|^(p-2) u and derivatives; the zero-coefficient guards keep
// p = 2 and p = 3 exact instead of producing 0 * inf.
inline double psi0(double mu, double p, double u) {
  const double a = std::abs(u);
  return u >= 0.0 ? mu * std::pow(a, p - 1.0) : -mu * std::pow(a, p - 1.0);
}
inline double psi1(double mu, double p, double u) {
  return mu * (p - 1.0) * std::pow(std::abs(u), p - 2.0);
}
inline double psi2(double mu, double p, double u) {
  const double c = mu * (p - 1.0) * (p - 2.0);
  if (c == 0.0) return 0.0;
  const double a = std::abs(u);
  const double m = std::pow(a, p - 3.0);
  return u >= 0.0 ? c * m : -c * m;
}
inline double psi3(double mu, double p, double u) {
  const double c = mu * (p - 1.0) * (p - 2.0) * (p - 3.0);
  if (c == 0.0) return 0.0;
  return c * std::pow(std::abs(u), p - 4.0);
}

}  // namespace detail

// H as a function of the slope alone, for callers that carry their own h'.
inline double composite_field_of_slope(const EnergyDensityParams& prm, double slope) {
  return -1.0 + detail::psi0(prm.mu, prm.p, slope);
}

inline double H_value(const RadialProfile& prof, double s) {
  return composite_field_of_slope(prof.params, prof.h.d1(s));
}

inline double H_deriv1(const RadialProfile& prof, double s) {
  const double u = prof.h.d1(s);
  return detail::psi1(prof.params.mu, prof.params.p, u) * prof.h.d2(s);
}

inline double H_deriv2(const RadialProfile& prof, double s) {
  const double mu = prof.params.mu, p = prof.params.p;
  const double u = prof.h.d1(s), h2 = prof.h.d2(s);
  return detail::psi2(mu, p, u) * h2 * h2 + detail::psi1(mu, p, u) * prof.h.d3(s);
}

inline double H_deriv3(const RadialProfile& prof, double s) {
  const double mu = prof.params.mu, p = prof.params.p;
  const double u = prof.h.d1(s), h2 = prof.h.d2(s), h3 = prof.h.d3(s);
  return detail::psi3(mu, p, u) * h2 * h2 * h2 + 3.0 * detail::psi2(mu, p, u) * h2 * h3 +
         detail::psi1(mu, p, u) * prof.h.d4(s);
}

// One-parameter family of facet profiles on r = 2*r0 with p = 2, mu = 1.
// The bulk slope is the quartic
//   h'(r0 + u) = (a/r0^2) u (u - r0)^2 + (d-1)/(2 r0^4) u^3 (u - r0),
// so h''(r0) = a, h'(r0) = h'(2 r0) = 0 and the outer boundary satisfies
// h''(2 r0) + (d-1)(-1 + h'(2 r0))/(2 r0) = 0 for every a.
inline RadialProfile facet_profile_family(int dim, double r0, double facet_curvature) {
  validate_facet_radii(r0, 2.0 * r0);
  if (dim < 1) throw std::invalid_argument("facet_profile_family: dim must be >= 1");
  const double a = facet_curvature;
  const double g = (dim - 1) / (2.0 * r0 * r0 * r0 * r0);
  // h'(r0 + u) = c4 u^4 + c3 u^3 + c2 u^2 + c1 u
  const double c4 = g;
  const double c3 = a / (r0 * r0) - g * r0;
  const double c2 = -2.0 * a / r0;
  const double c1 = a;
  // antiderivative of the bulk slope in u
  auto anti = [=](double u) {
    return u * u * (c1 / 2.0 + u * (c2 / 3.0 + u * (c3 / 4.0 + u * c4 / 5.0)));
  };
  const double anti_r0 = anti(r0);
  auto slope = [=](double s) {
    const double u = s - r0;
    return u * (c1 + u * (c2 + u * (c3 + u * c4)));
  };

  RadialProfile prof;
  prof.r0 = r0;
  prof.r = 2.0 * r0;
  prof.params = EnergyDensityParams(1.0, 2.0, dim);
  prof.h.f = [=](double s) { return s <= r0 ? -anti_r0 : anti(s - r0) - anti_r0; };
  prof.h.d1 = [=](double s) { return s <= r0 ? 0.0 : slope(s); };
  prof.h.d2 = [=](double s) {
    if (s < r0) return 0.0;
    const double u = s - r0;
    return c1 + u * (2.0 * c2 + u * (3.0 * c3 + u * 4.0 * c4));
  };
  prof.h.d3 = [=](double s) {
    if (s < r0) return 0.0;
    const double u = s - r0;
    return 2.0 * c2 + u * (6.0 * c3 + u * 12.0 * c4);
  };
  prof.h.d4 = [=](double s) {
    if (s < r0) return 0.0;
    const double u = s - r0;
    return 6.0 * c3 + 24.0 * c4 * u;
  };
  prof.bulk_slope = slope;
  return prof;
}

// The worked facet profile: curvature h''(r0) = -3/(5 r0), chosen so that the
// boundary-sphere coefficient of the canonical restriction is intended to
// vanish (the measured coefficient is reported, not assumed).
inline RadialProfile example_profile(int dim, double r0) {
  RadialProfile prof = facet_profile_family(dim, r0, -3.0 / (5.0 * r0));
  prof.expect_zero_surface_term = true;
  return prof;
}

namespace detail {

// Low-order one-sided stencils keep finite differences inside [lo, hi].
inline double bounded_derivative(const std::function<double(double)>& f, double x,
                                 int order, double lo, double hi, double h) {
  if (x - 2.0 * h >= lo && x + 2.0 * h <= hi) {
    return richardson_derivative(f, x, order, h, 4);
  }
  const double dir = (x - lo < hi - x) ? 1.0 : -1.0;
  auto at = [&](int k) { return f(x + dir * k * h); };
  if (order == 1) {
    return dir * (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) /
           (12.0 * h);
  }
  if (order == 2) {
    return (35.0 * at(0) - 104.0 * at(1) + 114.0 * at(2) - 56.0 * at(3) + 11.0 * at(4)) /
           (12.0 * h * h);
  }
  throw std::invalid_argument("bounded_derivative: order must be 1 or 2");
}

}  // namespace detail

// Profile from equally spaced (s, h) samples covering [r0, r].  A quintic
// B-spline keeps H three times differentiable in a meaningful sense; the two
// highest derivatives come from differencing the spline's second derivative.
inline RadialProfile sampled_profile(double r0, double r, const EnergyDensityParams& prm,
                                     const std::vector<std::pair<double, double>>& samples) {
  validate_facet_radii(r0, r);
  std::vector<double> ys;
  std::vector<double> ss;
  for (const auto& [s, h] : samples) {
    if (s < r0 - 1e-12 * r) continue;  // facet samples carry no slope information
    ss.push_back(s);
    ys.push_back(h);
  }
  if (ss.size() < 10) {
    throw std::invalid_argument("sampled_profile: need at least 10 samples on [r0, r]");
  }
  const double ds = (ss.back() - ss.front()) / static_cast<double>(ss.size() - 1);
  if (std::abs(ss.front() - r0) > 1e-9 * r || std::abs(ss.back() - r) > 1e-9 * r) {
    throw std::invalid_argument("sampled_profile: samples must span [r0, r]");
  }
  for (std::size_t i = 1; i < ss.size(); ++i) {
    if (std::abs(ss[i] - ss[i - 1] - ds) > 1e-9 * r) {
      throw std::invalid_argument("sampled_profile: samples must be equally spaced");
    }
  }

  using boost::math::interpolators::cardinal_quintic_b_spline;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // h'(r0) = 0 is part of the profile contract; everything else is estimated.
  auto spline = std::make_shared<cardinal_quintic_b_spline<double>>(
      ys.data(), ys.size(), r0, ds, std::make_pair(0.0, nan),
      std::make_pair(nan, nan));
  const double facet_height = ys.front();

  RadialProfile prof;
  prof.r0 = r0;
  prof.r = r;
  prof.params = prm;
  prof.h.f = [=](double s) { return s <= r0 ? facet_height : (*spline)(s); };
  prof.h.d1 = [=](double s) { return s <= r0 ? 0.0 : spline->prime(s); };
  prof.h.d2 = [=](double s) { return s < r0 ? 0.0 : spline->double_prime(s); };
  auto dp = [spline](double s) { return spline->double_prime(s); };
  const double fd_step = (r - r0) / 64.0;
  prof.h.d3 = [=](double s) {
    if (s < r0) return 0.0;
    return detail::bounded_derivative(dp, s, 1, r0, r, fd_step);
  };
  prof.h.d4 = [=](double s) {
    if (s < r0) return 0.0;
    return detail::bounded_derivative(dp, s, 2, r0, r, fd_step);
  };
  return prof;
}

}  // namespace facetflow
