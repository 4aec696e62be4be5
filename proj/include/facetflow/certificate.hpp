#pragma once

// Machine-checkable subgradient certificates: an edge field g claimed to
// witness u = -(-lap) div g as an element of the energy's subdifferential
// at f.  Verification is by (a) pointwise inclusion of g in dsigma(grad f),
// (b) sampling the defining inequality of the subdifferential in random
// directions, (c) compatibility of div g with the claimed u.

#include <cmath>
#include <cstdint>
#include <type_traits>
#include <vector>

#include "facetflow/canonical_restriction.hpp"
#include "facetflow/facet_extension.hpp"
#include "facetflow/flow.hpp"
#include "facetflow/grid.hpp"
#include "facetflow/radial_profile.hpp"
#include "facetflow/rng.hpp"

namespace facetflow {

template <class Grid>
struct SubgradientCertificate {
  std::vector<double> field;     // edge values of the witness g
  GridFunction<Grid> claimed_u;  // the subgradient element it encodes
};

struct CertificateReport {
  double inclusion_residual = 0.0;  // max set distance of g from dsigma(grad f)
  double graph_residual = 0.0;      // max resolvent residual |w - prox(w+g)|
  // Worst directional defect of the subgradient inequality: the excess
  // <u,h> + F(f) - F(f+h), maximized over directions and amplitudes, per
  // unit direction size (L2 + total variation) and per unit certificate
  // magnitude.  Zero or negative for an exact subgradient.
  double worst_violation = 0.0;
  double div_residual = 0.0;        // |div g - (-lap)^{-1}(-u)| relative
};

namespace detail {

inline void smooth_direction(const GridOps& ops, bool periodic, double domain,
                             Rng& rng, std::vector<double>& h) {
  h.assign(ops.nodes(), 0.0);
  constexpr int kModes = 6;
  for (int m = 1; m <= kModes; ++m) {
    const double a = rng.symmetric(1.0);
    const double b = periodic ? rng.symmetric(1.0) : 0.0;
    for (int j = 0; j < ops.nodes(); ++j) {
      const double x = j * ops.step();
      if (periodic) {
        h[j] += a * std::sin(2.0 * std::numbers::pi * m * x / domain) +
                b * std::cos(2.0 * std::numbers::pi * m * x / domain);
      } else {
        h[j] += a * std::sin(std::numbers::pi * m * x / domain);
      }
    }
  }
  ops.project(h);
}

inline void noise_direction(const GridOps& ops, Rng& rng, std::vector<double>& h) {
  h.resize(ops.nodes());
  for (int j = 0; j < ops.nodes(); ++j) h[j] = rng.symmetric(1.0);
  ops.project(h);
}

// Constant on the facet with a random smooth decay outside; these directions
// carry no kink slack on the facet and so expose certificate defects that
// live at the facet rim.
inline void plateau_direction(const GridOps& ops, double r0, double r, Rng& rng,
                              std::vector<double>& h) {
  h.assign(ops.nodes(), 0.0);
  const double p1 = 1.0 + 3.0 * rng.uniform();
  const double a1 = rng.symmetric(1.0);
  const double a2 = rng.symmetric(0.5);
  for (int j = 0; j < ops.nodes(); ++j) {
    const double s = j * ops.step();
    if (s <= r0) {
      h[j] = 1.0;
    } else {
      const double t = (s - r0) / (r - r0);  // 0 at the rim, 1 at the boundary
      h[j] = std::pow(1.0 - t, p1) *
             (1.0 + a1 * t + a2 * std::sin(std::numbers::pi * t));
    }
  }
  h[ops.nodes() - 1] = 0.0;
}

}  // namespace detail

template <class Grid>
CertificateReport verify_certificate(const GridFunction<Grid>& f,
                                     const SubgradientCertificate<Grid>& cert,
                                     const EnergyDensityParams& prm, int samples,
                                     std::uint64_t seed) {
  require_same_grid(f, cert.claimed_u);
  GridOps ops(f.grid);
  if (static_cast<int>(cert.field.size()) != ops.edges()) {
    throw std::invalid_argument("verify_certificate: field size does not match grid");
  }

  CertificateReport rep;

  std::vector<double> grad_f;
  ops.gradient(f.v, grad_f);
  for (int e = 0; e < ops.edges(); ++e) {
    rep.inclusion_residual = std::max(
        rep.inclusion_residual, distance_to_subdiff_scalar(prm, grad_f[e], cert.field[e]));
    rep.graph_residual = std::max(
        rep.graph_residual, subdiff_graph_residual_scalar(prm, grad_f[e], cert.field[e]));
  }

  std::vector<double> inv_u;
  ops.inverse_laplacian(cert.claimed_u.v, inv_u);
  {
    std::vector<double> divg;
    ops.divergence(cert.field, divg);
    double num = 0.0;
    for (int j = 0; j < ops.nodes(); ++j) {
      const double d = divg[j] + inv_u[j];
      num += d * d * ops.node_measures()[j];
    }
    rep.div_residual = std::sqrt(num) / (1.0 + std::sqrt(ops.l2_inner(inv_u, inv_u)));
  }

  const double Ff = discrete_energy(f, prm);
  const double domain = ops.periodic() ? ops.step() * ops.nodes() : ops.step() * ops.edges();
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  std::vector<double> dir, grad_dir, h;
  GridFunction<Grid> fh = f;
  for (int k = 0; k < samples; ++k) {
    Rng rng(seed ^ (0x9E3779B97F4A7C15ull * (k + 1)));
    if constexpr (std::is_same_v<Grid, RadialGrid>) {
      switch (k % 3) {
        case 0:
          detail::smooth_direction(ops, false, domain, rng, dir);
          break;
        case 1:
          detail::noise_direction(ops, rng, dir);
          break;
        default:
          detail::plateau_direction(ops, f.grid.r0, f.grid.r, rng, dir);
      }
    } else {
      if (k % 2 == 0) {
        detail::smooth_direction(ops, true, domain, rng, dir);
      } else {
        detail::noise_direction(ops, rng, dir);
      }
    }

    double pairing_dir = 0.0;
    for (int j = 0; j < ops.nodes(); ++j) {
      pairing_dir += inv_u[j] * dir[j] * ops.node_measures()[j];
    }
    ops.gradient(dir, grad_dir);
    double tv_dir = 0.0;
    for (int e = 0; e < ops.edges(); ++e) {
      tv_dir += ops.edge_measures()[e] * std::abs(grad_dir[e]);
    }
    const double l2_dir = std::sqrt(ops.l2_inner(dir, dir));

    // sweep the direction over large to small amplitudes of both signs; a
    // slightly defective certificate shows its per-unit defect at small
    // amplitude, where the convexity slack is negligible
    const double u_scale = 1.0 + std::sqrt(ops.l2_inner(inv_u, inv_u));
    for (int exp2 = 0; exp2 <= 20; exp2 += 2) {
      const double amp = std::pow(2.0, -exp2);
      for (double sign : {1.0, -1.0}) {
        const double scale = sign * amp;
        for (int j = 0; j < ops.nodes(); ++j) fh.v[j] = f.v[j] + scale * dir[j];
        const double Ffh = discrete_energy(fh, prm);
        const double viol = (scale * pairing_dir + Ff - Ffh) /
                            (amp * (l2_dir + tv_dir) * u_scale);
        rep.worst_violation = std::max(rep.worst_violation, viol);
      }
    }
  }
  return rep;
}

// Node-sampled canonical restriction with the facet-sphere term applied as a
// concentrated load at the r0 node (first-order accurate).
inline RadialField discretize_restriction(const CanonicalRestriction& cr,
                                          const RadialGrid& grid) {
  if (grid.dim != cr.dim) {
    throw std::invalid_argument("discretize_restriction: dimension mismatch");
  }
  GridOps ops(grid);
  RadialField u = make_function(grid);
  const int k0 = grid.facet_node();
  for (int j = 0; j < ops.nodes() - 1; ++j) {
    const double s = j * grid.ds();
    u.v[j] = j < k0 ? cr.facet_value : (j == k0 ? cr.facet_value : cr.bulk_density(s));
  }
  u.v[k0] += cr.surface_coeff * sphere_area(cr.dim, grid.r0) / ops.node_measures()[k0];
  return u;
}

// The analytic certificate of the radial facet profile: the facet extension
// glued to the bulk dual field, sampled at edge midpoints, with the
// canonical restriction as the claimed subgradient element.
inline SubgradientCertificate<RadialGrid> example_certificate(const RadialProfile& prof,
                                                              const RadialGrid& grid) {
  if (grid.dim != prof.params.dim || grid.r0 != prof.r0 || grid.r != prof.r) {
    throw std::invalid_argument("example_certificate: grid does not match profile");
  }
  const FacetExtension ext = solve_facet_extension(prof);
  SubgradientCertificate<RadialGrid> cert;
  cert.field.resize(grid.cells);
  for (int e = 0; e < grid.cells; ++e) {
    const double s = (e + 0.5) * grid.ds();
    cert.field[e] = s < prof.r0 ? ext.eta(s) : H_value(prof, s);
  }
  cert.claimed_u = discretize_restriction(canonical_restriction(prof), grid);
  return cert;
}

// Certificate recovered from the inner solver: the dual edge field together
// with the step quotient -(f1 - f0)/tau.
template <class Grid>
SubgradientCertificate<Grid> certificate_from_step(const FlowState<Grid>& before,
                                                   const StepOutcome<Grid>& out,
                                                   double tau) {
  SubgradientCertificate<Grid> cert;
  cert.field = out.dual_field;
  cert.claimed_u = out.state.f;
  for (std::size_t j = 0; j < cert.claimed_u.v.size(); ++j) {
    cert.claimed_u.v[j] = -(out.state.f.v[j] - before.f.v[j]) / tau;
  }
  return cert;
}

// Discretization of f(x) = h(|x|) on the radial grid.
inline RadialField sample_profile(const RadialProfile& prof, const RadialGrid& grid) {
  RadialField f = make_function(grid);
  for (int j = 0; j < grid.cells; ++j) f.v[j] = prof.h.f(j * grid.ds());
  f.v[grid.cells] = 0.0;
  return f;
}

}  // namespace facetflow
