#pragma once

// Discrete function spaces for the flow: a 1-D periodic grid (mean-zero
// functions) and a radial grid on [0, r] with a Dirichlet node at r and the
// d-dimensional shell measure.  Both share the same operator surface:
// gradient, weighted divergence, Laplacian, its inverse, and the shifted
// solves used by the proximal inner solver.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "facetflow/canonical_restriction.hpp"
#include "facetflow/energy_density.hpp"

namespace facetflow {

struct PeriodicGrid {
  int n = 0;        // cells == nodes == edges
  double omega = 1.0;

  PeriodicGrid() = default;
  PeriodicGrid(int n_, double omega_) : n(n_), omega(omega_) {
    if (n < 4) throw std::invalid_argument("PeriodicGrid: need n >= 4");
    if (!(omega > 0.0)) throw std::invalid_argument("PeriodicGrid: omega must be > 0");
  }

  double dx() const { return omega / n; }
  bool operator==(const PeriodicGrid& o) const { return n == o.n && omega == o.omega; }
};

struct RadialGrid {
  double r0 = 0.0, r = 0.0;
  int cells = 0;  // nodes 0..cells at s_j = j * ds; node `cells` is pinned to 0
  int dim = 1;

  RadialGrid() = default;
  RadialGrid(double r0_, double r_, int cells_, int dim_)
      : r0(r0_), r(r_), cells(cells_), dim(dim_) {
    validate_facet_radii(r0, r);
    if (cells < 4) throw std::invalid_argument("RadialGrid: need at least 4 cells");
    if (dim < 1) throw std::invalid_argument("RadialGrid: dim must be >= 1");
    const double k = r0 / ds();
    if (std::abs(k - std::round(k)) > 1e-9) {
      throw std::invalid_argument("RadialGrid: r0 must fall on a grid node");
    }
  }

  double ds() const { return r / cells; }
  int facet_node() const { return static_cast<int>(std::round(r0 / ds())); }
  bool operator==(const RadialGrid& o) const {
    return r0 == o.r0 && r == o.r && cells == o.cells && dim == o.dim;
  }
};

template <class Grid>
struct GridFunction {
  Grid grid;
  std::vector<double> v;
};

using PeriodicField = GridFunction<PeriodicGrid>;
using RadialField = GridFunction<RadialGrid>;

// All discrete operators for one grid, with measures precomputed.
class GridOps {
 public:
  explicit GridOps(const PeriodicGrid& g)
      : periodic_(true), nodes_(g.n), free_nodes_(g.n), edges_(g.n), step_(g.dx()) {
    edge_m_.assign(edges_, step_);
    node_w_.assign(nodes_, step_);
    lambda_max_ = estimate_lambda_max();
  }

  explicit GridOps(const RadialGrid& g)
      : periodic_(false),
        nodes_(g.cells + 1),
        free_nodes_(g.cells),
        edges_(g.cells),
        step_(g.ds()) {
    const double wd = unit_ball_volume(g.dim);
    auto ball = [&](double s) { return wd * std::pow(s, g.dim); };
    edge_m_.resize(edges_);
    for (int e = 0; e < edges_; ++e) {
      edge_m_[e] = ball((e + 1) * step_) - ball(e * step_);
    }
    node_w_.resize(nodes_);
    for (int j = 0; j < nodes_; ++j) {
      const double lo = std::max(0.0, (j - 0.5) * step_);
      const double hi = std::min(g.r, (j + 0.5) * step_);
      node_w_[j] = ball(hi) - ball(lo);
    }
    lambda_max_ = estimate_lambda_max();
  }

  bool periodic() const { return periodic_; }
  int nodes() const { return nodes_; }
  int edges() const { return edges_; }
  double step() const { return step_; }
  const std::vector<double>& edge_measures() const { return edge_m_; }
  const std::vector<double>& node_measures() const { return node_w_; }
  double lambda_max() const { return lambda_max_; }

  std::vector<double> zero_nodes() const { return std::vector<double>(nodes_, 0.0); }
  std::vector<double> zero_edges() const { return std::vector<double>(edges_, 0.0); }

  void gradient(const std::vector<double>& v, std::vector<double>& e) const {
    e.resize(edges_);
    for (int i = 0; i < edges_; ++i) {
      const int j = periodic_ ? (i + 1) % nodes_ : i + 1;
      e[i] = (v[j] - v[i]) / step_;
    }
  }

  // Adjoint of the gradient w.r.t. the weighted node/edge inner products:
  // <grad f, g>_m = <f, adjoint_gradient g>_w.  Equals minus the divergence.
  void adjoint_gradient(const std::vector<double>& g, std::vector<double>& out) const {
    out.assign(nodes_, 0.0);
    for (int j = 0; j < free_nodes_; ++j) {
      const int prev = periodic_ ? (j + edges_ - 1) % edges_ : j - 1;
      double acc = -edge_m_[j] * g[j];
      if (prev >= 0) acc += edge_m_[prev] * g[prev];
      out[j] = acc / (step_ * node_w_[j]);
    }
  }

  void divergence(const std::vector<double>& g, std::vector<double>& out) const {
    adjoint_gradient(g, out);
    for (double& x : out) x = -x;
  }

  void laplacian(const std::vector<double>& v, std::vector<double>& out) const {
    std::vector<double> e;
    gradient(v, e);
    adjoint_gradient(e, out);
  }

  double l2_inner(const std::vector<double>& a, const std::vector<double>& b) const {
    double s = 0.0;
    for (int j = 0; j < nodes_; ++j) s += a[j] * b[j] * node_w_[j];
    return s;
  }

  double edge_inner(const std::vector<double>& a, const std::vector<double>& b) const {
    double s = 0.0;
    for (int e = 0; e < edges_; ++e) s += a[e] * b[e] * edge_m_[e];
    return s;
  }

  // Orthogonal projection onto the constrained space: zero mean (periodic)
  // or zero trace at the Dirichlet node (radial).
  void project(std::vector<double>& v) const {
    if (periodic_) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= nodes_;
      for (double& x : v) x -= mean;
    } else {
      v[nodes_ - 1] = 0.0;
    }
  }

  // Solves -lap(u) = b in the constrained space.
  void inverse_laplacian(const std::vector<double>& b, std::vector<double>& u) const {
    if (periodic_) {
      inverse_laplacian_periodic(b, u);
    } else {
      std::vector<double> rhs(free_nodes_);
      for (int j = 0; j < free_nodes_; ++j) rhs[j] = b[j] * node_w_[j];
      u.assign(nodes_, 0.0);
      solve_tridiag(0.0, rhs, u);
    }
  }

  // Solves (alpha W + S) f = rhs, S the stiffness matrix, rhs in weighted
  // (load-vector) units.  This is the proximal solve of the quadratic
  // negative-Sobolev coupling.
  void shifted_solve(double alpha, const std::vector<double>& rhs,
                     std::vector<double>& f) const {
    if (periodic_) {
      solve_cyclic(alpha, rhs, f);
    } else {
      f.assign(nodes_, 0.0);
      solve_tridiag(alpha, rhs, f);
    }
  }

 private:
  void inverse_laplacian_periodic(const std::vector<double>& b,
                                  std::vector<double>& u) const {
    const int n = nodes_;
    double mean_b = 0.0;
    for (double x : b) mean_b += x;
    mean_b /= n;
    // integrate twice: edge flux first, then the potential
    std::vector<double> q(n);
    q[0] = 0.0;
    for (int i = 1; i < n; ++i) q[i] = q[i - 1] - step_ * (b[i] - mean_b);
    double mean_q = 0.0;
    for (double x : q) mean_q += x;
    mean_q /= n;
    u.assign(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) u[i + 1] = u[i] + step_ * (q[i] - mean_q);
    project(u);
  }

  // Thomas algorithm on the Dirichlet-pinned chain.
  void solve_tridiag(double alpha, const std::vector<double>& rhs,
                     std::vector<double>& f) const {
    const int n = free_nodes_;
    std::vector<double> diag(n), sub(n), work(n);
    for (int j = 0; j < n; ++j) {
      const double m_prev = j > 0 ? edge_m_[j - 1] : 0.0;
      diag[j] = alpha * node_w_[j] + (m_prev + edge_m_[j]) / (step_ * step_);
      sub[j] = -(j > 0 ? edge_m_[j - 1] : 0.0) / (step_ * step_);
    }
    // forward sweep; the matrix is symmetric, so sub[j] == upper(j-1)
    work[0] = diag[0];
    f[0] = rhs[0];
    for (int j = 1; j < n; ++j) {
      const double l = sub[j] / work[j - 1];
      work[j] = diag[j] - l * upper(j - 1);
      f[j] = rhs[j] - l * f[j - 1];
    }
    f[n - 1] /= work[n - 1];
    for (int j = n - 2; j >= 0; --j) {
      f[j] = (f[j] - upper(j) * f[j + 1]) / work[j];
    }
    if (!periodic_) f[nodes_ - 1] = 0.0;
  }

  double upper(int j) const { return -edge_m_[j] / (step_ * step_); }

  // Cyclic tridiagonal solve via the Sherman-Morrison rank-one update.
  void solve_cyclic(double alpha, const std::vector<double>& rhs,
                    std::vector<double>& f) const {
    const int n = nodes_;
    const double off = -step_ / (step_ * step_);  // -m/step^2, uniform
    const double diag0 = alpha * step_ + 2.0 * step_ / (step_ * step_);
    const double gamma = -diag0;

    std::vector<double> b(n, diag0), r1(rhs), u(n, 0.0);
    b[0] = diag0 - gamma;
    b[n - 1] = diag0 - off * off / gamma;
    u[0] = gamma;
    u[n - 1] = off;

    std::vector<double> y(n), z(n);
    solve_uniform_tridiag(b, off, r1, y);
    solve_uniform_tridiag(b, off, u, z);
    const double vy = y[0] + (off / gamma) * y[n - 1];
    const double vz = z[0] + (off / gamma) * z[n - 1];
    const double fac = vy / (1.0 + vz);
    f.resize(n);
    for (int j = 0; j < n; ++j) f[j] = y[j] - fac * z[j];
  }

  static void solve_uniform_tridiag(const std::vector<double>& diag, double off,
                                    const std::vector<double>& rhs,
                                    std::vector<double>& x) {
    const int n = static_cast<int>(diag.size());
    std::vector<double> w(n);
    x = rhs;
    w[0] = diag[0];
    for (int j = 1; j < n; ++j) {
      const double l = off / w[j - 1];
      w[j] = diag[j] - l * off;
      x[j] -= l * x[j - 1];
    }
    x[n - 1] /= w[n - 1];
    for (int j = n - 2; j >= 0; --j) x[j] = (x[j] - off * x[j + 1]) / w[j];
  }

  double estimate_lambda_max() const {
    // Gershgorin bound for M^{-1} S; an upper bound is required so the
    // primal-dual step-size product stays admissible.  Sharp for the uniform
    // periodic grid, within a dimension-dependent factor near the radial
    // center node.
    double bound = 0.0;
    for (int j = 0; j < free_nodes_; ++j) {
      const double m_prev = j > 0 || periodic_ ? edge_m_[(j + edges_ - 1) % edges_] : 0.0;
      bound = std::max(bound, 2.0 * (m_prev + edge_m_[j]) / (node_w_[j] * step_ * step_));
    }
    return bound;
  }

  bool periodic_;
  int nodes_, free_nodes_, edges_;
  double step_;
  std::vector<double> edge_m_, node_w_;
  double lambda_max_ = 0.0;
};

inline GridOps make_ops(const PeriodicGrid& g) { return GridOps(g); }
inline GridOps make_ops(const RadialGrid& g) { return GridOps(g); }

template <class Grid>
GridFunction<Grid> make_function(const Grid& grid) {
  GridFunction<Grid> f;
  f.grid = grid;
  f.v.assign(make_ops(grid).nodes(), 0.0);
  return f;
}

template <class Grid>
void enforce_constraint(GridFunction<Grid>& f) {
  make_ops(f.grid).project(f.v);
}

template <class Grid>
void require_same_grid(const GridFunction<Grid>& a, const GridFunction<Grid>& b) {
  if (!(a.grid == b.grid)) {
    throw std::invalid_argument("grid functions live on different grids");
  }
}

template <class Grid>
double neg_sobolev_inner(const GridFunction<Grid>& a, const GridFunction<Grid>& b) {
  require_same_grid(a, b);
  GridOps ops(a.grid);
  std::vector<double> u;
  ops.inverse_laplacian(a.v, u);
  return ops.l2_inner(u, b.v);
}

template <class Grid>
double neg_sobolev_norm(const GridFunction<Grid>& a) {
  return std::sqrt(neg_sobolev_inner(a, a));
}

template <class Grid>
double discrete_energy(const GridFunction<Grid>& f, const EnergyDensityParams& prm) {
  GridOps ops(f.grid);
  std::vector<double> e;
  ops.gradient(f.v, e);
  double total = 0.0;
  const auto& m = ops.edge_measures();
  for (int i = 0; i < ops.edges(); ++i) total += m[i] * sigma_scalar(prm, e[i]);
  return total;
}

}  // namespace facetflow
