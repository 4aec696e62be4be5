#pragma once

// The minimal-norm element of the energy's subdifferential for a radial
// facet profile: a constant on the facet, a bulk density outside, and a
// surface term on the facet boundary sphere.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "facetflow/errors.hpp"
#include "facetflow/facet_extension.hpp"
#include "facetflow/radial_profile.hpp"
#include "facetflow/richardson.hpp"

namespace facetflow {

inline double unit_ball_volume(int dim) {
  return std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

inline double sphere_area(int dim, double radius) {
  return dim * unit_ball_volume(dim) * std::pow(radius, dim - 1);
}

// For d >= 5 the subdifferential characterization needs p >= 2d/(d+4); the
// machinery refuses configurations outside that range instead of silently
// dropping the extra pairing condition.
inline void require_admissible_exponent(int dim, double p) {
  if (dim >= 5 && p < 2.0 * dim / (dim + 4.0)) {
    throw std::invalid_argument(
        "exponent p below 2d/(d+4): the Dirichlet subgradient characterization "
        "does not reduce to the pointwise inclusion in this range");
  }
}

struct AssumptionReport {
  double boundary_residual = 0.0;   // H'(r) + (d-1) H(r)/r
  bool interval_ok = false;         // H'(r0) in [-9/r0, 0]
  double no_delta_residual = 0.0;   // H''(r0) - 3 H'(r0)/r0 - 3/r0^2
  double facet_bound_max = 0.0;     // max |eta| on [0, r0]

  // profile sanity, reported alongside the restriction hypotheses
  double h_at_r = 0.0;              // should vanish
  double facet_slope_max = 0.0;     // max |h'| on [0, r0], should vanish
  double bulk_slope_sign_max =      // max h' on (r0, r), should be < 0
      -std::numeric_limits<double>::infinity();
  double smoothness_residual = 0.0; // analytic H''' vs FD of H''
  double H1_at_r0 = 0.0;
  double H1_at_r = 0.0;
};

inline constexpr double kIntervalSlack = 1e-12;
inline constexpr double kFacetBoundTol = 1e-9;

inline double boundary_residual_tolerance(const AssumptionReport& rep) {
  return 1e-8 * (1.0 + std::abs(rep.H1_at_r));
}

inline bool assumptions_pass(const AssumptionReport& rep) {
  return std::abs(rep.boundary_residual) <= boundary_residual_tolerance(rep) &&
         rep.interval_ok && rep.facet_bound_max <= 1.0 + kFacetBoundTol;
}

inline AssumptionReport check_assumptions(const RadialProfile& prof) {
  validate_facet_radii(prof.r0, prof.r);
  require_admissible_exponent(prof.params.dim, prof.params.p);
  const double r0 = prof.r0, r = prof.r;
  const int d = prof.params.dim;

  AssumptionReport rep;
  rep.H1_at_r0 = H_deriv1(prof, r0);
  rep.H1_at_r = H_deriv1(prof, r);
  rep.boundary_residual = rep.H1_at_r + (d - 1.0) / r * H_value(prof, r);
  rep.interval_ok = rep.H1_at_r0 >= -9.0 / r0 - kIntervalSlack &&
                    rep.H1_at_r0 <= kIntervalSlack;
  rep.no_delta_residual =
      H_deriv2(prof, r0) - 3.0 / r0 * rep.H1_at_r0 - 3.0 / (r0 * r0);
  rep.facet_bound_max = facet_field_max(solve_facet_extension(r0, rep.H1_at_r0), r0);

  rep.h_at_r = prof.h.f(r);
  const int kSamples = 64;
  for (int i = 0; i <= kSamples; ++i) {
    const double s = r0 * i / kSamples;
    rep.facet_slope_max = std::max(rep.facet_slope_max, std::abs(prof.h.d1(s)));
  }
  for (int i = 1; i < kSamples; ++i) {
    const double s = r0 + (r - r0) * i / kSamples;
    rep.bulk_slope_sign_max = std::max(rep.bulk_slope_sign_max, prof.h.d1(s));
  }
  // C^3 smoothness of H: analytic third derivative against a Richardson
  // difference of the analytic second derivative, interior points only.
  auto H2 = [&](double s) { return H_deriv2(prof, s); };
  const double fd_step = (r - r0) / 64.0;
  for (int i = 2; i <= 8; ++i) {
    const double s = r0 + (r - r0) * i / 10.0;
    const double fd = richardson_derivative(H2, s, 1, fd_step, 4);
    const double an = H_deriv3(prof, s);
    rep.smoothness_residual = std::max(
        rep.smoothness_residual, std::abs(fd - an) / (1.0 + std::abs(an)));
  }
  return rep;
}

struct CanonicalRestriction {
  double facet_value = 0.0;                    // constant density on the facet
  std::function<double(double)> bulk_density;  // density on (r0, r)
  double surface_coeff = 0.0;  // coefficient of the integral over the facet sphere
  int dim = 0;
};

inline CanonicalRestriction canonical_restriction(const RadialProfile& prof) {
  const AssumptionReport rep = check_assumptions(prof);
  if (std::abs(rep.boundary_residual) > boundary_residual_tolerance(rep)) {
    throw AssumptionError("canonical_restriction: outer boundary divergence residual",
                          rep.boundary_residual);
  }
  if (!rep.interval_ok) {
    throw AssumptionError("canonical_restriction: H'(r0) outside [-9/r0, 0]",
                          rep.H1_at_r0);
  }
  if (rep.facet_bound_max > 1.0 + kFacetBoundTol) {
    throw AssumptionError("canonical_restriction: facet field exceeds the unit ball",
                          rep.facet_bound_max);
  }

  const double r0 = prof.r0;
  const int d = prof.params.dim;
  CanonicalRestriction out;
  out.dim = d;
  out.facet_value = d * (d + 2.0) / (r0 * r0) * (rep.H1_at_r0 + 1.0 / r0);
  out.surface_coeff = rep.no_delta_residual;
  const RadialProfile p = prof;  // capture by value; profiles are immutable
  out.bulk_density = [p, d](double s) {
    return H_deriv3(p, s) + 2.0 * (d - 1.0) / s * H_deriv2(p, s) +
           (d - 1.0) * (d - 3.0) / (s * s) * H_deriv1(p, s) -
           (d - 1.0) * (d - 3.0) / (s * s * s) * H_value(p, s);
  };
  return out;
}

struct ExtensionFieldReport {
  double ode_residual_max = 0.0;     // relative, over a sample grid in (0, r0]
  double value_jump = 0.0;           // |eta(r0) - H(r0)|
  double divergence_jump = 0.0;      // radial divergence mismatch at r0
  double boundary_divergence = 0.0;  // divergence of the bulk field at r
};

inline ExtensionFieldReport verify_extension_field(const RadialProfile& prof,
                                                   const FacetExtension& ext) {
  const double r0 = prof.r0, r = prof.r;
  const int d = prof.params.dim;
  ExtensionFieldReport rep;
  const SmoothFn eta = ext.as_smooth_fn();
  for (int i = 1; i <= 50; ++i) {
    const double s = r0 * i / 50.0;
    const double scale = radial_ode_scale(d, eta, s);
    rep.ode_residual_max = std::max(
        rep.ode_residual_max, std::abs(radial_ode_residual(d, eta, s)) / (1.0 + scale));
  }
  rep.value_jump = std::abs(ext.eta(r0) - H_value(prof, r0));
  const double div_facet = ext.eta1(r0) + (d - 1.0) / r0 * ext.eta(r0);
  const double div_bulk = H_deriv1(prof, r0) + (d - 1.0) / r0 * H_value(prof, r0);
  rep.divergence_jump = std::abs(div_facet - div_bulk);
  rep.boundary_divergence = std::abs(H_deriv1(prof, r) + (d - 1.0) / r * H_value(prof, r));
  return rep;
}

}  // namespace facetflow
