#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "facetflow/certificate.hpp"
#include "facetflow/slope_check.hpp"
#include "support/oracles.hpp"

using namespace facetflow;

TEST_CASE("the zero certificate witnesses 0 in dF(0)") {
  PeriodicGrid g(32, 1.0);
  EnergyDensityParams prm(1.0, 2.0, 1);
  PeriodicField f = make_function(g);
  SubgradientCertificate<PeriodicGrid> cert;
  cert.field.assign(32, 0.0);
  cert.claimed_u = make_function(g);
  auto rep = verify_certificate(f, cert, prm, 32, 7);
  CHECK(rep.inclusion_residual == 0.0);
  CHECK(rep.worst_violation <= 1e-14);
  CHECK(rep.div_residual <= 1e-14);
}

TEST_CASE("example certificate residuals shrink at first order in the spacing") {
  auto prof = example_profile(2, 1.0);
  double prev_violation = 0.0;
  for (int ncells : {128, 256, 512}) {
    RadialGrid g(1.0, 2.0, ncells, 2);
    auto f = sample_profile(prof, g);
    auto cert = example_certificate(prof, g);
    auto rep = verify_certificate(f, cert, prof.params, 100, 42);
    // pointwise inclusion is second order (midpoint sampling of smooth data)
    CHECK(rep.inclusion_residual <= 10.0 / (ncells * double(ncells)));
    // the concentrated surface load keeps div-compatibility first order
    CHECK(rep.div_residual <= 50.0 / ncells);
    CHECK(rep.worst_violation <= 10.0 / ncells);
    if (prev_violation > 0.0) {
      CHECK(rep.worst_violation <= 0.75 * prev_violation);
    }
    prev_violation = rep.worst_violation;
  }
}

TEST_CASE("a wrong claimed subgradient breaks div-compatibility") {
  auto prof = example_profile(2, 1.0);
  RadialGrid g(1.0, 2.0, 128, 2);
  auto f = sample_profile(prof, g);
  auto cert = example_certificate(prof, g);
  for (double& u : cert.claimed_u.v) u *= 2.0;
  auto rep = verify_certificate(f, cert, prof.params, 32, 5);
  CHECK(rep.div_residual > 0.3);
  // two orders of magnitude above the correct certificate's O(spacing) level
  CHECK(rep.worst_violation > 0.05);
}

TEST_CASE("a facet field outside the unit ball is flagged") {
  auto prof = example_profile(2, 1.0);
  RadialGrid g(1.0, 2.0, 128, 2);
  auto f = sample_profile(prof, g);
  auto cert = example_certificate(prof, g);
  for (int e = 0; e < g.cells; ++e) {
    const double s = (e + 0.5) * g.ds();
    if (s < 1.0) cert.field[e] *= 2.0;  // breaks |g| <= 1 on the facet
  }
  auto rep = verify_certificate(f, cert, prof.params, 16, 11);
  // |2 eta| peaks one half-cell inside the facet rim, so allow O(spacing)
  CHECK(rep.inclusion_residual >= 1.0 - 3.0 * g.ds());
  CHECK(rep.graph_residual >= 0.4);
}

TEST_CASE("discretized restriction pairs like the continuum functional") {
  auto prof = example_profile(2, 1.0);
  RadialGrid g(1.0, 2.0, 512, 2);
  GridOps ops(g);
  auto cr = canonical_restriction(prof);
  auto u = discretize_restriction(cr, g);
  // pair with a smooth test function phi vanishing at r
  auto phi = [&](double s) { return std::cos(0.25 * std::numbers::pi * s / 2.0) -
                                    std::cos(0.25 * std::numbers::pi); };
  double discrete = 0.0;
  for (int j = 0; j < ops.nodes(); ++j) {
    discrete += u.v[j] * phi(j * g.ds()) * ops.node_measures()[j];
  }
  // continuum: facet integral + bulk integral + surface term
  auto bulk = [&](double s) { return cr.bulk_density(s) * phi(s) * s; };
  auto facet = [&](double s) { return cr.facet_value * phi(s) * s; };
  double continuum = 2.0 * std::numbers::pi *
                     (oracles::integrate(facet, 0.0, 1.0) + oracles::integrate(bulk, 1.0, 2.0));
  continuum += cr.surface_coeff * sphere_area(2, 1.0) * phi(1.0);
  CHECK(discrete == Catch::Approx(continuum).epsilon(5e-3));
}

TEST_CASE("slope check converges to the canonical facet speed") {
  auto prof = example_profile(2, 1.0);
  RadialGrid g(1.0, 2.0, 512, 2);
  StepOptions opt;
  opt.tol = 1e-10;
  const double taus[] = {4e-3, 2e-3, 1e-3};
  auto rep = initial_slope_check(prof, taus, g, opt);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.facet_target == Catch::Approx(-3.2).margin(1e-12));
  // distances decrease with tau at fixed spacing
  CHECK(rep.rows[1].h_neg_distance <= rep.rows[0].h_neg_distance);
  CHECK(rep.rows[2].h_neg_distance <= rep.rows[1].h_neg_distance);
  // the facet-region slope approaches -16/5
  CHECK(rep.rows[2].facet_slope == Catch::Approx(-3.2).epsilon(0.05));

  // joint refinement: halving both the spacing and tau shrinks the distance
  RadialGrid coarse(1.0, 2.0, 256, 2);
  const double tau_coarse[] = {4e-3};
  auto rep_coarse = initial_slope_check(prof, tau_coarse, coarse, opt);
  CHECK(rep.rows[2].h_neg_distance < rep_coarse.rows[0].h_neg_distance);
}

TEST_CASE("slope check with a zero facet value") {
  // H'(r0) = -1/r0 zeroes the facet speed but leaves a large boundary-sphere
  // coefficient (+4/r0^2), so the flow quotient approaches its limit slowly.
  // The limit object itself -- the discrete minimal-norm subgradient -- is
  // computed independently and must carry a vanishing facet mean.
  auto prof = facet_profile_family(2, 1.0, -1.0);
  RadialGrid g(1.0, 2.0, 128, 2);
  StepOptions opt;
  opt.tol = 1e-10;
  const double taus[] = {2e-3, 5e-4, 1.25e-4};
  auto rep = initial_slope_check(prof, taus, g, opt);
  CHECK(rep.facet_target == Catch::Approx(0.0).margin(1e-12));
  // the quotient's facet mean shrinks toward zero as tau decreases
  CHECK(std::abs(rep.rows[2].facet_slope) < std::abs(rep.rows[0].facet_slope));

  // facet mean of the exact discrete minimal section vanishes at first order
  const auto qp = oracles::minimal_section_qp(prof, RadialGrid(1.0, 2.0, 256, 2));
  CHECK(qp.box_inactive);
  CHECK(std::abs(qp.facet_mean) <= 0.3);
  const auto qp_fine = oracles::minimal_section_qp(prof, RadialGrid(1.0, 2.0, 512, 2));
  CHECK(std::abs(qp_fine.facet_mean) <= 0.15);
  const double ratio = std::abs(qp_fine.facet_mean) / std::abs(qp.facet_mean);
  CHECK(ratio >= 0.3);
  CHECK(ratio <= 0.7);
}

TEST_CASE("minimal-norm subgradient oracle reproduces the canonical facet value") {
  auto prof = example_profile(2, 1.0);
  const auto coarse = oracles::minimal_section_qp(prof, RadialGrid(1.0, 2.0, 256, 2));
  const auto fine = oracles::minimal_section_qp(prof, RadialGrid(1.0, 2.0, 512, 2));
  CHECK(coarse.box_inactive);
  CHECK(fine.box_inactive);
  CHECK(std::abs(coarse.facet_mean - 3.2) <= 0.1);
  CHECK(std::abs(fine.facet_mean - 3.2) <= 0.05);
  // first-order convergence toward the closed-form facet value
  CHECK(std::abs(fine.facet_mean - 3.2) <= 0.7 * std::abs(coarse.facet_mean - 3.2));
}
