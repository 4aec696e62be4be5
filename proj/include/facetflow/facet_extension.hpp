#pragma once

// Extension of the dual field onto the facet: the radial component
// eta(s) = C1 s + C2 s^3 solving the 4th-order Euler equation with
// continuity of the field and of its divergence at the facet boundary.

#include <cmath>
#include <vector>

#include "facetflow/radial_profile.hpp"
#include "facetflow/smooth_fn.hpp"

namespace facetflow {

struct FacetExtension {
  double c_linear = 0.0;  // coefficient of s
  double c_cubic = 0.0;   // coefficient of s^3

  double eta(double s) const { return s * (c_linear + c_cubic * s * s); }
  double eta1(double s) const { return c_linear + 3.0 * c_cubic * s * s; }
  double eta2(double s) const { return 6.0 * c_cubic * s; }
  double eta3(double /*s*/) const { return 6.0 * c_cubic; }
  double eta4(double /*s*/) const { return 0.0; }

  SmoothFn as_smooth_fn() const {
    const double c1 = c_linear, c3 = c_cubic;
    return SmoothFn{
        [=](double s) { return s * (c1 + c3 * s * s); },
        [=](double s) { return c1 + 3.0 * c3 * s * s; },
        [=](double s) { return 6.0 * c3 * s; },
        [=](double) { return 6.0 * c3; },
        [](double) { return 0.0; },
    };
  }
};

// Solves the 2x2 continuity system
//   C1 r0 + C2 r0^3   = -1            (field matches H(r0) = -1)
//   C1   + 3 C2 r0^2  = H'(r0)        (radial divergence matches)
// C1 is eliminated through the first equation so that eta(r0) = -1 holds to
// the last bit.
inline FacetExtension solve_facet_extension(double r0, double H1_at_r0) {
  FacetExtension ext;
  ext.c_cubic = (H1_at_r0 + 1.0 / r0) / (2.0 * r0 * r0);
  ext.c_linear = -1.0 / r0 - ext.c_cubic * r0 * r0;
  return ext;
}

inline FacetExtension solve_facet_extension(const RadialProfile& prof) {
  return solve_facet_extension(prof.r0, H_deriv1(prof, prof.r0));
}

// Largest |eta| on [0, r0], located by inspecting the cubic's interior
// critical point and the endpoint.  eta(r0) = -1 always, so the result is
// at least 1; values above 1 violate the unit-ball constraint on the facet.
inline double facet_field_max(const FacetExtension& ext, double r0) {
  double m = std::abs(ext.eta(r0));
  if (ext.c_cubic != 0.0) {
    const double s2 = -ext.c_linear / (3.0 * ext.c_cubic);
    if (s2 > 0.0) {
      const double s = std::sqrt(s2);
      if (s < r0) m = std::max(m, std::abs(ext.eta(s)));
    }
  }
  return m;
}

// Residual of the radial Euler equation
//   s^4 eta'''' + 2(d-1) s^3 eta''' + (d-1)(d-5) s^2 eta''
//     - 3(d-1)(d-3) s eta' + 3(d-1)(d-3) eta
// whose kernel is spanned by {s, s^3, s^-(d-1)} plus the dimension-dependent
// fourth branch.
inline double radial_ode_residual(int dim, const SmoothFn& eta, double s) {
  const double dm1 = dim - 1.0;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
  return s4 * eta.d4(s) + 2.0 * dm1 * s3 * eta.d3(s) +
         dm1 * (dim - 5.0) * s2 * eta.d2(s) - 3.0 * dm1 * (dim - 3.0) * s * eta.d1(s) +
         3.0 * dm1 * (dim - 3.0) * eta.f(s);
}

// Sum of the magnitudes of the five terms, for relative residuals.
inline double radial_ode_scale(int dim, const SmoothFn& eta, double s) {
  const double dm1 = dim - 1.0;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
  return std::abs(s4 * eta.d4(s)) + std::abs(2.0 * dm1 * s3 * eta.d3(s)) +
         std::abs(dm1 * (dim - 5.0) * s2 * eta.d2(s)) +
         std::abs(3.0 * dm1 * (dim - 3.0) * s * eta.d1(s)) +
         std::abs(3.0 * dm1 * (dim - 3.0) * eta.f(s));
}

inline double radial_ode_residual_fd(int dim, const std::function<double(double)>& eta,
                                     double s, double h0) {
  return radial_ode_residual(dim, smooth_fn_from_values(eta, h0), s);
}

// The four solutions of the Euler equation, including the s*log(s) branch
// that replaces s^-(d-3) in dimension 2.
inline std::vector<SmoothFn> ode_solution_basis(int dim) {
  std::vector<SmoothFn> basis;
  basis.push_back(power_fn(1.0));
  basis.push_back(power_fn(3.0));
  basis.push_back(power_fn(-(dim - 1.0)));
  if (dim == 2) {
    basis.push_back(s_log_s_fn());
  } else {
    basis.push_back(power_fn(-(dim - 3.0)));
  }
  return basis;
}

}  // namespace facetflow
