#include <cmath>

#include "doctest.h"
#include "lrare/error.hpp"
#include "lrare/potential.hpp"
#include "lrare/sde.hpp"

using namespace lrare;

TEST_CASE("time grid rounds up to a whole number of steps") {
  auto g = TimeGrid::make(1.0, 1e-3);
  CHECK(g.steps == 1000);
  CHECK_FALSE(g.rounded);
  auto r = TimeGrid::make(1.0, 0.3);
  CHECK(r.steps == 4);
  CHECK(r.rounded);
  CHECK(r.horizon == doctest::Approx(1.2));
  CHECK_THROWS_AS(TimeGrid::make(1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(TimeGrid::make(-1.0, 0.1), ConfigError);
}

TEST_CASE("V = 0 paths are scaled sums of the recorded increments") {
  ZeroPotential V;
  const auto noise = NoiseScale::from_sigma(0.8);
  const auto grid = TimeGrid::make(1.0, 0.01);
  NormalStream normals(11);
  const Point x0 = {0.25};
  const auto path = simulate(V, noise, x0, grid, normals);
  REQUIRE(path.has_increments());
  double x = 0.25;
  for (std::size_t i = 0; i < grid.steps; ++i) {
    x += 0.8 * std::sqrt(0.01) * path.increment(i)[0];
    CHECK(path.state(i + 1)[0] == doctest::Approx(x).epsilon(1e-14));
  }
  CHECK(path.times().back() == doctest::Approx(1.0));
}

TEST_CASE("Euler-Maruyama moments for OU match the discrete recursion") {
  // X_{i+1} = (1 - k h) X_i + sigma sqrt(h) xi: mean (1 - kh)^n x0,
  // variance sigma^2 h (1 - (1-kh)^{2n}) / (1 - (1-kh)^2).
  QuadraticPotential V(1.0);
  const auto noise = NoiseScale::from_sigma(1.0);
  const auto grid = TimeGrid::make(1.0, 1e-2);
  const double a = 1.0 - 1e-2;
  const double mean = std::pow(a, 100);
  const double var = 1e-2 * (1.0 - std::pow(a, 200)) / (1.0 - a * a);
  const int n = 20000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    NormalStream normals(RngPolicy{5}, k);
    Point x = {1.0};
    integrate(V, nullptr, noise, grid, normals, std::span<double>(x),
              [](std::size_t, auto, auto) {});
    s += x[0];
    s2 += x[0] * x[0];
  }
  const double m = s / n;
  const double v = s2 / n - m * m;
  CHECK(std::abs(m - mean) < 4.0 * std::sqrt(var / n));
  CHECK(std::abs(v - var) < 4.0 * var * std::sqrt(2.0 / n));
}

TEST_CASE("streams are reproducible and distinct") {
  RngPolicy policy{42};
  NormalStream a(policy, 3), b(policy, 3), c(policy, 4);
  const double x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(policy.stream_seed(0) != RngPolicy{43}.stream_seed(0));
}

TEST_CASE("constant reference drift shifts the path") {
  ZeroPotential V;
  auto F = DriftField::constant({2.0});
  const auto grid = TimeGrid::make(0.5, 0.05);
  NormalStream n1(9), n2(9);
  const Point x0 = {0.0};
  const auto with = simulate_with_drift(V, F, NoiseScale::from_sigma(1.0), x0, grid, n1);
  const auto without = simulate(V, NoiseScale::from_sigma(1.0), x0, grid, n2);
  CHECK(with.terminal()[0] - without.terminal()[0] == doctest::Approx(1.0));
}

TEST_CASE("deterministic dynamics with sigma = 0") {
  QuadraticPotential V(2.0, 2);
  const auto grid = TimeGrid::make(1.0, 0.1);
  NormalStream normals(1);
  const Point x0 = {1.0, -2.0};
  const auto p = simulate(V, NoiseScale::from_sigma(0.0), x0, grid, normals);
  CHECK(p.terminal()[0] == doctest::Approx(std::pow(0.8, 10)));
  CHECK(p.terminal()[1] == doctest::Approx(-2.0 * std::pow(0.8, 10)));
}

TEST_CASE("blow-up is reported with the step index") {
  QuadraticPotential V(1e6);
  const auto grid = TimeGrid::make(1.0, 1e-3);
  NormalStream normals(2);
  const Point x0 = {0.5};
  try {
    simulate(V, NoiseScale::from_sigma(1.0), x0, grid, normals);
    FAIL("expected a SimulationError");
  } catch (const SimulationError& e) {
    CHECK(e.step() > 0);
    CHECK(e.step() <= grid.steps);
  }
}
