#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "facetflow/conjugate_oracle.hpp"
#include "facetflow/rng.hpp"

using namespace facetflow;

TEST_CASE("brute-force conjugate basics") {
  EnergyDensityParams prm(1.0, 2.0, 2);
  CHECK(sigma_conj_bruteforce(prm, Vec::zero(2), 2.0, 4).value == 0.0);

  auto r = sigma_conj_bruteforce(prm, Vec{2.0, 0.0}, 6.0, 8);
  CHECK(!r.boundary_attained);
  CHECK(r.value == Catch::Approx(0.5).margin(1e-6));

  // inside the unit ball the sup is ~0
  auto inside = sigma_conj_bruteforce(prm, Vec{0.6, 0.3}, 4.0, 8);
  CHECK(std::abs(inside.value) <= 1e-8);
}

TEST_CASE("brute-force value is monotone in refinement") {
  EnergyDensityParams prm(0.5, 3.0, 2);
  const Vec y{2.5, -1.0};
  const double radius = conjugate_search_radius(prm, y);
  double prev = -1.0;
  for (int levels = 1; levels <= 8; ++levels) {
    const double v = sigma_conj_bruteforce(prm, y, radius, levels).value;
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("boundary flag reports an undersized search radius") {
  EnergyDensityParams prm(1.0, 2.0, 1);
  // maximizer of <y,x> - sigma(x) for y=5 sits at x = 4; radius 2 truncates it
  auto r = sigma_conj_bruteforce(prm, Vec{5.0}, 2.0, 6);
  CHECK(r.boundary_attained);
  auto ok = sigma_conj_bruteforce(prm, Vec{5.0}, conjugate_search_radius(prm, Vec{5.0}), 8);
  CHECK(!ok.boundary_attained);
  CHECK(ok.value > r.value);
}

TEST_CASE("closed form matches the oracle over the parameter sweep") {
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    for (double mu : {0.5, 1.0, 2.0}) {
      for (int d : {1, 2, 3}) {
        EnergyDensityParams prm(mu, p, d);
        Rng rng(1000 + static_cast<std::uint64_t>(p * 10 + mu * 100 + d));
        for (double t : {0.0, 0.5, 0.9, 1.0, 1.1, 2.0, 3.5, 5.0}) {
          Vec dir(d);
          double n = 0.0;
          for (int i = 0; i < d; ++i) {
            dir[i] = rng.symmetric(1.0);
            n += dir[i] * dir[i];
          }
          n = std::sqrt(n);
          const Vec y = n > 0 ? dir * (t / n) : Vec::zero(d);
          const double radius = conjugate_search_radius(prm, y);
          auto oracle = sigma_conj_bruteforce(prm, y, radius, 8);
          CHECK(!oracle.boundary_attained);
          CHECK(sigma_conj(prm, y) == Catch::Approx(oracle.value).margin(1e-6));
        }
      }
    }
  }
}
