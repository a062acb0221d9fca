#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lrare/error.hpp"
#include "lrare/potential.hpp"
#include "lrare/rate_action.hpp"

using namespace lrare;
using std::numbers::pi;

TEST_CASE("action of straight paths") {
  ZeroPotential Z;
  const Point a = {0.0}, b = {pi};
  const auto p = DiscretePath::straight(a, b, 1.0, 200);
  CHECK(action(p, Z) == doctest::Approx(pi * pi / 2).epsilon(1e-14));
  // Constant path at a critical point costs nothing.
  CHECK(action(DiscretePath::constant(a, 1.0, 50), CosineWell()) == 0.0);
  // Following the gradient flow backwards costs 2 (V(end) - V(start)) in the
  // continuum; forward flow costs 0. Check a uniform-speed path for V = x.
  LinearPotential L({1.0});
  const auto q = DiscretePath::straight(Point{0.0}, Point{-1.0}, 1.0, 10);
  CHECK(action(q, L) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("action gradient matches finite differences") {
  CosineWell V(2);
  auto p = DiscretePath::straight(Point{0.1, -0.2}, Point{2.0, 1.0}, 0.8, 12);
  for (std::size_t i = 1; i < 12; ++i) {
    p.knots[2 * i] += 0.3 * std::sin(1.0 * i);
    p.knots[2 * i + 1] += 0.2 * std::cos(0.7 * i);
  }
  std::vector<double> g(p.knots.size());
  action_gradient(p, V, g);
  for (std::size_t j = 0; j < p.knots.size(); ++j) {
    auto up = p, down = p;
    const double h = 1e-6;
    up.knots[j] += h;
    down.knots[j] -= h;
    const double fd = (action(up, V) - action(down, V)) / (2 * h);
    CHECK(g[j] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("free Brownian exit costs distance^2 / (2T)") {
  ZeroPotential Z;
  const auto r = minimize_exit_action(Z, Point{0.0}, *parse_region("interval:-pi,pi"), 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(pi * pi / 2).epsilon(1e-3));
  CHECK(std::abs(r.path.terminal()[0]) == doctest::Approx(pi));

  ZeroPotential Z2(2);
  const auto ball = minimize_exit_action(Z2, Point{0.0, 0.0},
                                         *parse_region("ball:0,0:1"), 1.0);
  CHECK(ball.value == doctest::Approx(0.5).epsilon(1e-3));
  const auto box = minimize_exit_action(Z2, Point{0.5, 0.0},
                                        *parse_region("box:-1,-1:1,1"), 2.0);
  CHECK(box.value == doctest::Approx(0.25 / 4).epsilon(1e-3));
}

TEST_CASE("starting outside D costs nothing") {
  const auto r = minimize_exit_action(CosineWell(), Point{4.0},
                                      *parse_region("interval:-pi,pi"), 1.0);
  CHECK(r.value == 0.0);
  CHECK(r.converged);
}

TEST_CASE("cosine well exit beats a two-parameter family of paths") {
  // phi(s) = pi (s + a sin(pi s) + b sin(2 pi s)), s = t / T.
  CosineWell V;
  const std::size_t m = 100;
  double family = 1e300;
  for (int ia = -20; ia <= 20; ++ia) {
    for (int ib = -20; ib <= 20; ++ib) {
      const double a = 0.05 * ia, b = 0.05 * ib;
      DiscretePath p = DiscretePath::straight(Point{0.0}, Point{pi}, 1.0, m);
      for (std::size_t i = 0; i <= m; ++i) {
        const double s = static_cast<double>(i) / m;
        p.knots[i] = pi * (s + a * std::sin(pi * s) + b * std::sin(2 * pi * s));
      }
      family = std::min(family, action(p, V));
    }
  }
  ActionOptions opt;
  opt.knots = m;
  const auto r = minimize_exit_action(V, Point{0.0}, *parse_region("interval:-pi,pi"), 1.0, opt);
  CHECK(r.value <= family * (1 + 1e-3));
  // The straight line costs pi^2/2 + 2 + 1/4 in the continuum.
  CHECK(r.value < pi * pi / 2 + 2.25);
}

TEST_CASE("iteration cap returns the best path flagged as not converged") {
  ActionOptions opt;
  opt.max_iterations = 2;
  const auto r = minimize_exit_action(CosineWell(), Point{0.0},
                                      *parse_region("interval:-pi,pi"), 1.0, opt);
  CHECK_FALSE(r.converged);
  CHECK(std::isfinite(r.value));
  opt.knots = 1;
  CHECK_THROWS_AS(minimize_exit_action(CosineWell(), Point{0.0},
                                       *parse_region("interval:-pi,pi"), 1.0, opt),
                  ConfigError);
}
