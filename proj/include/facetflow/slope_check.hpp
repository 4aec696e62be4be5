#pragma once

// Checks that the first minimizing-movement quotient (f1 - f0)/tau tracks
// minus the canonical restriction as tau shrinks.

#include <cmath>
#include <span>
#include <vector>

#include "facetflow/certificate.hpp"
#include "facetflow/flow.hpp"

namespace facetflow {

struct SlopeCheckRow {
  double tau = 0.0;
  double h_neg_distance = 0.0;  // |(f1-f0)/tau + u_c|_{H^-1}
  double facet_slope = 0.0;     // measure-weighted mean of the quotient on s <= r0/2
  long iterations = 0;
};

struct SlopeCheckReport {
  std::vector<SlopeCheckRow> rows;
  double facet_target = 0.0;           // -facet_value of the restriction
  std::vector<double> measured_orders; // log2(dist_i / dist_{i+1}) per tau halving
};

inline SlopeCheckReport initial_slope_check(const RadialProfile& prof,
                                            std::span<const double> taus,
                                            const RadialGrid& grid,
                                            const StepOptions& opt = {}) {
  const AssumptionReport rep = check_assumptions(prof);
  if (!assumptions_pass(rep)) {
    throw AssumptionError("initial_slope_check: profile fails the restriction assumptions",
                          rep.boundary_residual);
  }
  const CanonicalRestriction cr = canonical_restriction(prof);
  const RadialField u_c = discretize_restriction(cr, grid);
  const RadialField f0 = sample_profile(prof, grid);
  const FlowState<RadialGrid> start = make_flow_state(f0, prof.params);
  GridOps ops(grid);

  SlopeCheckReport report;
  report.facet_target = -cr.facet_value;
  for (double tau : taus) {
    auto out = minimizing_movement_step(start, tau, prof.params, opt);
    RadialField diff = make_function(grid);
    for (int j = 0; j < ops.nodes(); ++j) {
      diff.v[j] = (out.state.f.v[j] - start.f.v[j]) / tau + u_c.v[j];
    }
    SlopeCheckRow row;
    row.tau = tau;
    row.h_neg_distance = neg_sobolev_norm(diff);
    double mass = 0.0, mean = 0.0;
    for (int j = 0; j < ops.nodes(); ++j) {
      const double s = j * grid.ds();
      if (s <= 0.5 * grid.r0) {
        mean += ops.node_measures()[j] *
                (out.state.f.v[j] - start.f.v[j]) / tau;
        mass += ops.node_measures()[j];
      }
    }
    row.facet_slope = mean / mass;
    row.iterations = out.iterations;
    report.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    const double ratio = report.rows[i].h_neg_distance / report.rows[i + 1].h_neg_distance;
    const double step = report.rows[i].tau / report.rows[i + 1].tau;
    report.measured_orders.push_back(std::log(ratio) / std::log(step));
  }
  return report;
}

}  // namespace facetflow
