#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "facetflow/conjugate_oracle.hpp"
#include "facetflow/energy_density.hpp"
#include "facetflow/rng.hpp"
#include "support/oracles.hpp"

using namespace facetflow;

TEST_CASE("sigma closed forms") {
  EnergyDensityParams p12(1.0, 2.0, 2);
  CHECK(sigma(p12, Vec::zero(2)) == 0.0);
  CHECK(sigma(p12, Vec{2.0, 0.0}) == Catch::Approx(4.0).margin(1e-15));
  EnergyDensityParams p23(2.0, 3.0, 3);
  CHECK(sigma(p23, Vec{1.0, 0.0, 0.0}) == Catch::Approx(1.0 + 2.0 / 3.0).margin(1e-15));
}

TEST_CASE("sigma is zero only at the origin and convex") {
  Rng rng(11);
  EnergyDensityParams prm(0.7, 2.5, 3);
  for (int k = 0; k < 200; ++k) {
    Vec x(3), z(3);
    for (int i = 0; i < 3; ++i) {
      x[i] = rng.symmetric(3.0);
      z[i] = rng.symmetric(3.0);
    }
    if (norm(x) > 0.0) CHECK(sigma(prm, x) > 0.0);
    // midpoint convexity
    const double lhs = sigma(prm, (x + z) * 0.5);
    const double rhs = 0.5 * (sigma(prm, x) + sigma(prm, z));
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("conjugate exponent round-trips") {
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    EnergyDensityParams prm(1.0, p, 1);
    const double q = prm.conjugate_exponent();
    CHECK(1.0 / p + 1.0 / q == Catch::Approx(1.0).margin(1e-15));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(EnergyDensityParams(0.0, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(EnergyDensityParams(-1.0, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(EnergyDensityParams(1.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(EnergyDensityParams(1.0, 2.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(prox_sigma(EnergyDensityParams(1.0, 2.0, 2), 0.0, Vec{1.0, 0.0}),
                  std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(sigma(EnergyDensityParams(1.0, 2.0, 2), Vec{inf, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("sigma_conj closed form") {
  EnergyDensityParams prm(1.0, 2.0, 2);
  CHECK(sigma_conj(prm, Vec{0.3, 0.4}) == 0.0);   // |y| <= 1
  CHECK(sigma_conj(prm, Vec::zero(2)) == 0.0);
  CHECK(sigma_conj(prm, Vec{2.0, 0.0}) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("continuity of the conjugate and its subdifferential across |y| = 1") {
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    EnergyDensityParams q(0.8, p, 2);
    const double eps = 1e-8;
    const double below = sigma_conj(q, Vec{1.0 - eps, 0.0});
    const double above = sigma_conj(q, Vec{1.0 + eps, 0.0});
    CHECK(std::abs(above - below) <= 1e-6);
    // the subdifferential's modulus of continuity at the kink is
    // (|y|-1)^{1/(p-1)}, i.e. weaker than Lipschitz for p > 2
    const Vec g_below = subdiff_sigma_conj(q, Vec{1.0 - eps, 0.0}).value();
    const Vec g_above = subdiff_sigma_conj(q, Vec{1.0 + eps, 0.0}).value();
    const double modulus =
        2.0 * std::pow(eps / q.mu, 1.0 / (q.p - 1.0)) + 1e-12;
    CHECK(norm(g_above - g_below) <= std::max(1e-6, modulus));
  }
}

TEST_CASE("subdiff_sigma branches") {
  EnergyDensityParams prm(1.0, 2.0, 2);
  CHECK(!subdiff_sigma(prm, Vec::zero(2)).is_singleton());
  auto s = subdiff_sigma(prm, Vec{1.0, 0.0});
  REQUIRE(s.is_singleton());
  CHECK(s.value()[0] == Catch::Approx(2.0).margin(1e-15));
  CHECK(s.value()[1] == 0.0);

  // near-zero inputs are treated as the kink
  CHECK(!subdiff_sigma(EnergyDensityParams(1.0, 1.5, 2), Vec{1e-15, 0.0}).is_singleton());

  EnergyDensityParams p3(1.0, 3.0, 2);
  auto s3 = subdiff_sigma(p3, Vec{2.0, 0.0});
  REQUIRE(s3.is_singleton());
  CHECK(s3.value()[0] == Catch::Approx(5.0).margin(1e-12));
  // Fenchel-Young equality against the brute-force conjugate
  const double lhs = sigma(p3, Vec{2.0, 0.0}) +
                     sigma_conj_bruteforce(p3, s3.value(), 8.0, 9).value;
  CHECK(lhs == Catch::Approx(dot(Vec{2.0, 0.0}, s3.value())).margin(1e-6));
}

TEST_CASE("subdiff_sigma_conj matches a finite-difference gradient") {
  EnergyDensityParams prm(1.0, 2.0, 2);
  CHECK(norm(subdiff_sigma_conj(prm, Vec{0.5, 0.1}).value()) == 0.0);
  CHECK(norm(subdiff_sigma_conj(prm, Vec::zero(2)).value()) == 0.0);

  auto g = subdiff_sigma_conj(prm, Vec{2.0, 0.0});
  REQUIRE(g.is_singleton());
  CHECK(g.value()[0] == Catch::Approx(1.0).margin(1e-12));

  Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    EnergyDensityParams q(rng.uniform(0.5, 2.0), rng.uniform(1.5, 4.0), 2);
    Vec y{rng.symmetric(4.0), rng.symmetric(4.0)};
    if (std::abs(norm(y) - 1.0) < 0.05) continue;  // kink of the conjugate
    auto fd = oracles::fd_gradient([&](const Vec& v) { return sigma_conj(q, v); }, y);
    auto an = subdiff_sigma_conj(q, y).value();
    CHECK(norm(fd - an) <= 1e-6 * (1.0 + norm(an)));
  }
}

TEST_CASE("Fenchel-Young inequality and duality involution on samples") {
  Rng rng(17);
  for (int k = 0; k < 500; ++k) {
    const int d = rng.uniform_int(1, 3);
    EnergyDensityParams prm(rng.uniform(0.5, 2.0), rng.uniform(1.5, 4.0), d);
    Vec x(d), y(d);
    for (int i = 0; i < d; ++i) {
      x[i] = rng.symmetric(3.0);
      y[i] = rng.symmetric(3.0);
    }
    // inequality for arbitrary pairs
    CHECK(sigma(prm, x) + sigma_conj(prm, y) >= dot(x, y) - 1e-12);
    // equality iff y in dsigma(x)
    auto sub = subdiff_sigma(prm, x);
    if (sub.is_singleton()) {
      const Vec g = sub.value();
      CHECK(std::abs(sigma(prm, x) + sigma_conj(prm, g) - dot(x, g)) <= 1e-10);
      // involution: x must be the (single-valued) subdifferential of the
      // conjugate at g
      auto back = subdiff_sigma_conj(prm, g);
      CHECK(norm(back.value() - x) <= 1e-9 * (1.0 + norm(x)));
    } else {
      // ball case: the conjugate's subdifferential collapses to {0} inside
      Vec inside(d);
      for (int i = 0; i < d; ++i) inside[i] = y[i];
      const double n = norm(inside);
      if (n > 1.0) {
        for (int i = 0; i < d; ++i) inside[i] = y[i] / (n * 1.0000001);
      }
      CHECK(norm(subdiff_sigma_conj(prm, inside).value()) == 0.0);
    }
  }
}

TEST_CASE("Fenchel-Young gap is strictly positive away from the subdifferential") {
  // the converse of the equality case: if y is far from dsigma(x), the gap
  // must stay clear of the 1e-10 equality threshold
  Rng rng(53);
  int tested = 0;
  while (tested < 300) {
    const int d = rng.uniform_int(1, 3);
    EnergyDensityParams prm(rng.uniform(0.5, 2.0), rng.uniform(1.5, 4.0), d);
    Vec x(d), y(d);
    for (int i = 0; i < d; ++i) {
      x[i] = rng.symmetric(3.0);
      y[i] = rng.symmetric(3.0);
    }
    if (subdiff_sigma(prm, x).distance_to(y) < 1e-3) continue;
    ++tested;
    const double gap = sigma(prm, x) + sigma_conj(prm, y) - dot(x, y);
    CHECK(gap > 1e-10);
  }
}

TEST_CASE("prox_sigma closed form and optimality") {
  EnergyDensityParams prm(1.0, 2.0, 2);
  CHECK(norm(prox_sigma(prm, 1.0, Vec::zero(2))) == 0.0);
  auto w = prox_sigma(prm, 1.0, Vec{3.0, 0.0});
  CHECK(w[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(w[1] == 0.0);

  // |z| <= lambda: zero is optimal because z/lambda lies in the unit ball
  Rng rng(23);
  for (int k = 0; k < 100; ++k) {
    const double lambda = rng.uniform(0.1, 2.0);
    Vec z{rng.symmetric(1.0), rng.symmetric(1.0)};
    const double n = norm(z);
    if (n > 0.0) z *= lambda * rng.uniform() / n;
    auto p = prox_sigma(prm, lambda, z);
    CHECK(norm(p) == 0.0);
    CHECK(subdiff_sigma(prm, p).distance_to(z * (1.0 / lambda)) <= 1e-12);
  }
}

TEST_CASE("prox_sigma optimality residual across exponents") {
  Rng rng(31);
  for (int k = 0; k < 500; ++k) {
    const int d = rng.uniform_int(1, 3);
    EnergyDensityParams prm(rng.uniform(0.3, 3.0), rng.uniform(1.2, 4.0), d);
    const double lambda = rng.uniform(0.05, 2.0);
    Vec z(d);
    for (int i = 0; i < d; ++i) z[i] = rng.symmetric(5.0);
    const Vec w = prox_sigma(prm, lambda, z);
    const Vec residual_point = (z - w) * (1.0 / lambda);
    CHECK(subdiff_sigma(prm, w).distance_to(residual_point) <= 1e-10);
  }
}

TEST_CASE("prox_sigma at extreme parameters") {
  // very small and very large lambda with exponents near both ends
  Rng rng(41);
  for (int k = 0; k < 200; ++k) {
    const double p = k % 2 == 0 ? rng.uniform(1.05, 1.3) : rng.uniform(3.5, 6.0);
    EnergyDensityParams prm(rng.uniform(0.1, 5.0), p, 1);
    const double lambda = k % 3 == 0 ? rng.uniform(1e-4, 1e-2) : rng.uniform(2.0, 10.0);
    Vec z{rng.symmetric(8.0)};
    const Vec w = prox_sigma(prm, lambda, z);
    CHECK(is_finite(w));
    // the resolvent-graph residual stays well-posed even when the exponent
    // drives the prox output to within rounding of the kink
    CHECK(subdiff_graph_residual_scalar(prm, w[0], (z[0] - w[0]) / lambda) <= 1e-9);
    if (std::abs(w[0]) >= 1e-12) {
      CHECK(subdiff_sigma(prm, w).distance_to((z - w) * (1.0 / lambda)) <= 1e-9);
    }
  }
}

TEST_CASE("prox_sigma near the kink for p close to 1") {
  // For p -> 1+ and |z| just above lambda, the minimizer sits at
  // t = ((|z|-lambda)/(lambda mu))^{1/(p-1)}, which underflows the
  // subdifferential's zero branch while still being a genuine nonzero root.
  EnergyDensityParams prm(3.425779, 1.173890, 1);
  const double lambda = 2.95753649;
  const Vec z{-2.99229124};
  const Vec w = prox_sigma(prm, lambda, z);
  CHECK(w[0] < 0.0);
  CHECK(std::abs(w[0]) < 1e-13);
  const double t = std::abs(w[0]);
  const double phi = t + lambda * prm.mu * std::pow(t, prm.p - 1.0) + lambda - norm(z);
  CHECK(std::abs(phi) <= 1e-11);
  CHECK(subdiff_graph_residual_scalar(prm, w[0], (z[0] - w[0]) / lambda) <= 1e-12);
}

TEST_CASE("pointwise operations are safe to call from multiple threads") {
  // smoke test of the no-shared-mutable-state claim: four threads replay
  // the same deterministic workload and must reproduce the serial results
  EnergyDensityParams prm(0.9, 2.7, 2);
  auto workload = [&](std::vector<double>& sink) {
    Rng rng(77);
    sink.clear();
    for (int k = 0; k < 2000; ++k) {
      Vec z{rng.symmetric(4.0), rng.symmetric(4.0)};
      const double lambda = rng.uniform(0.1, 2.0);
      sink.push_back(sigma(prm, z));
      sink.push_back(sigma_conj(prm, z));
      sink.push_back(norm(prox_sigma(prm, lambda, z)));
      sink.push_back(subdiff_sigma(prm, z).distance_to(Vec{0.3, 0.1}));
    }
  };
  std::vector<double> serial;
  workload(serial);
  std::vector<std::vector<double>> results(4);
  std::vector<std::thread> pool;
  for (auto& r : results) pool.emplace_back(workload, std::ref(r));
  for (auto& t : pool) t.join();
  for (const auto& r : results) CHECK(r == serial);
}

TEST_CASE("prox_sigma agrees with a 1-D brute-force scan") {
  Rng rng(37);
  for (int k = 0; k < 40; ++k) {
    EnergyDensityParams prm(rng.uniform(0.3, 3.0), rng.uniform(1.2, 4.0), 2);
    const double lambda = rng.uniform(0.05, 2.0);
    Vec z{rng.symmetric(5.0), rng.symmetric(5.0)};
    const double a = norm(z);
    if (a < 1e-6) continue;
    auto objective = [&](double t) {
      return lambda * sigma_of_modulus(prm, t) + 0.5 * (t - a) * (t - a);
    };
    const double t_scan = oracles::grid_argmin(objective, 0.0, a);
    const Vec w = prox_sigma(prm, lambda, z);
    CHECK(norm(w) == Catch::Approx(t_scan).margin(1e-6));
  }
}
