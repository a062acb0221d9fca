#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lrare/density.hpp"
#include "lrare/error.hpp"
#include "lrare/fp_oracle.hpp"
#include "lrare/potential.hpp"
#include "support.hpp"

using namespace lrare;
using namespace lrare::testing;

TEST_CASE("gaussian kernel") {
  const double z = 0.0;
  CHECK(gaussian_kernel(std::span(&z, 1), 1.0, 1.0) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-15));
  const Point a = {0.3, -0.2}, b = {-0.3, 0.2};
  CHECK(gaussian_kernel(a, 0.7, 1.3) == gaussian_kernel(b, 0.7, 1.3));
  double sum = 0.0;
  const double dx = 1e-3;
  for (int i = -20000; i <= 20000; ++i) {
    const double x = i * dx;
    sum += gaussian_kernel(std::span(&x, 1), 0.5, 1.2) * dx;
  }
  CHECK(std::abs(sum - 1.0) < 1e-6);
  CHECK_THROWS_AS(gaussian_kernel(std::span(&z, 1), 0.0, 1.0), DomainError);
}

TEST_CASE("simpson is exact for cubics") {
  auto f = [](double r) { return 4 * r * r * r - 3 * r * r + 2; };
  CHECK(simpson_unit_interval(f, 101) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(simpson_unit_interval(f, 4) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("V = 0 reproduces the heat kernel") {
  ZeroPotential V;
  const auto noise = NoiseScale::from_sigma(1.3);
  const Point x = {0.1}, y = {0.9};
  const Point d = {0.8};
  CHECK(approximate(V, noise, x, y, 0.4) == gaussian_kernel(d, 0.4, 1.3));
  const auto est = estimate_density(V, noise, x, y, 0.4);
  const double rho = gaussian_kernel(d, 0.4, 1.3);
  const double gamma = std::exp(-2 * std::pow(0.4, 0.8) / (1.69 * 0.4));
  CHECK(est.constants.M1 == 0.0);
  CHECK(est.upper == doctest::Approx((1 + 2 * gamma) * rho));
  CHECK(est.lower == doctest::Approx(std::max(0.0, (1 - 2 * gamma) * rho)));
}

TEST_CASE("linear potentials are reproduced exactly") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0), ut(0.01, 2.0), us(0.3, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double a = u(rng), t = ut(rng), sigma = us(rng);
    const Point x = {u(rng)}, y = {u(rng)};
    LinearPotential V({a});
    const auto noise = NoiseScale::from_sigma(sigma);
    const double exact = normal_pdf(y[0], x[0] - a * t, sigma * sigma * t);
    const double approx = approximate(V, noise, x, y, t);
    CHECK(std::abs(approx - exact) <= 1e-12 * exact);
    const auto est = estimate_density(V, noise, x, y, t);
    CHECK(est.lower <= exact);
    CHECK(exact <= est.upper);
  }
}

TEST_CASE("constant reference drift, linear V: shifted Gaussian") {
  // dX = (-a + b) dt + sigma dW with reference dX = b dt + sigma dW.
  const double a = 0.7, b = -0.4, t = 0.3, sigma = 0.9;
  LinearPotential V({a});
  const auto F = DriftField::constant({b});
  const auto noise = NoiseScale::from_sigma(sigma);
  const Point x = {0.2}, y = {-0.1};
  const double p_ref = normal_pdf(y[0], x[0] + b * t, sigma * sigma * t);
  const double exact = normal_pdf(y[0], x[0] + (b - a) * t, sigma * sigma * t);
  CHECK(approximate_general(V, F, noise, x, y, t, p_ref) ==
        doctest::Approx(exact).epsilon(1e-12));
  // F = 0 with p_ref = rho_t reduces to approximate().
  CosineWell W;
  const double rho = gaussian_kernel(Point{y[0] - x[0]}, t, sigma);
  CHECK(approximate_general(W, DriftField::zero(1), noise, x, y, t, rho) ==
        doctest::Approx(approximate(W, noise, x, y, t)).epsilon(1e-14));
  CHECK(approximate_general(ZeroPotential(), F, noise, x, y, t, 0.25) ==
        doctest::Approx(0.25));
}

TEST_CASE("OU: error shrinks at least linearly in t and bounds bracket") {
  QuadraticPotential V(1.0);
  const auto noise = NoiseScale::from_beta(1.0);
  const Point x = {0.0}, y = {0.5};
  std::vector<double> ts = {0.2, 0.1, 0.05, 0.025}, errs;
  for (double t : ts) {
    const double exact = ou_density(0.0, 0.5, t, 1.0, noise.sigma());
    const auto est = estimate_density(V, noise, x, y, t);
    errs.push_back(std::abs(est.approx - exact) / exact);
    CHECK(est.lower <= exact);
    CHECK(exact <= est.upper);
    CHECK(est.lower <= est.approx);
    CHECK(est.approx <= est.upper);
  }
  // Least-squares slope of log err against log t.
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mx += std::log(ts[i]) / 4;
    my += std::log(errs[i]) / 4;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (std::log(ts[i]) - mx) * (std::log(errs[i]) - my);
    sxx += (std::log(ts[i]) - mx) * (std::log(ts[i]) - mx);
  }
  CHECK(sxy / sxx >= 1.0);
}

TEST_CASE("cosine well bounds bracket the Fokker-Planck density") {
  CosineWell V;
  const auto noise = NoiseScale::from_sigma(1.0);
  const Point x = {0.0}, y = {0.5};
  const double t = 0.1;
  auto grid = FpGrid::make(-4.0, 4.0, 3200, 1e-4);
  set_point_mass(grid, 0.0);
  const auto out = evolve(V, noise, grid, t);
  // y = 0.5 is the face between two cells; average them.
  const std::size_t i = static_cast<std::size_t>((0.5 + 4.0) / out.dx);
  const double p = 0.5 * (out.density[i - 1] + out.density[i]);
  const auto est = estimate_density(V, noise, x, y, t);
  CHECK(est.lower <= p);
  CHECK(p <= est.upper);
  CHECK(est.approx == doctest::Approx(p).epsilon(0.02));
}

TEST_CASE("bridge simulation reproduces the OU density, and the chord approximation") {
  // p_t(x, y) = rho_t(y - x) E_bridge[exp(sigma^-2 (V(x) - V(y) + 1/2 int G))].
  QuadraticPotential V(1.0);
  const auto noise = NoiseScale::from_sigma(1.0);
  const double x = 0.0, y = 0.3, t = 0.05;
  const std::size_t steps = 200;
  const int n = 20000;
  double s = 0, s2 = 0;
  for (int k = 0; k < n; ++k) {
    NormalStream normals(RngPolicy{31}, k);
    const auto b = brownian_bridge(x, y, t, 1.0, steps, normals);
    double integral = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
      const double g = generator_apply_to_self(V, noise, std::span(&b[i], 1));
      integral += (i == 0 || i == steps ? 0.5 : 1.0) * g * (t / steps);
    }
    const double w = std::exp(V.value(std::span(&x, 1)) - V.value(std::span(&y, 1)) +
                              0.5 * integral);
    s += w;
    s2 += w * w;
  }
  const double rho = gaussian_kernel(Point{y - x}, t, 1.0);
  const double mean = s / n * rho;
  const double se = std::sqrt((s2 / n - (s / n) * (s / n)) / n) * rho;
  const double exact = ou_density(x, y, t, 1.0, 1.0);
  CHECK(std::abs(mean - exact) < 3 * se + 1e-5 * exact);
  const double approx = approximate(V, noise, Point{x}, Point{y}, t);
  CHECK(std::abs(approx - mean) < 3 * se + 1e-3 * exact);
}

TEST_CASE("corridor bound") {
  CHECK(corridor_violation_bound(1, 1.0, 1.0, 1.0) ==
        doctest::Approx(2 * std::exp(-2.0)).epsilon(1e-15));
  CHECK(corridor_violation_bound(1, 1.0, 0.25, 1.0 * 0.5) ==
        doctest::Approx(corridor_violation_bound(1, 1.0, 1.0, 1.0)));
  CHECK(corridor_violation_bound(3, 1.0, 1.0, 50.0) < 1e-300);
  CHECK(corridor_violation_bound(2, 1.0, 1.0, 1e-9) <= 4.0);
}

TEST_CASE("bridge corridor exits follow the Kolmogorov series") {
  const double sigma = 1.0, t = 1.0, delta = 1.0;
  const int n = 40000;
  int exits = 0;
  for (int k = 0; k < n; ++k) {
    NormalStream normals(RngPolicy{77}, k);
    const auto b = brownian_bridge(0.3, -0.4, t, sigma, 64, normals);
    exits += leaves_corridor(b, 0.3, -0.4, t, sigma, delta, normals);
  }
  const double p = bridge_exit_probability(sigma, t, delta);
  const double freq = static_cast<double>(exits) / n;
  CHECK(std::abs(freq - p) < 4 * std::sqrt(p * (1 - p) / n));
  CHECK(freq <= corridor_violation_bound(1, sigma, t, delta) +
                    3 * std::sqrt(freq * (1 - freq) / n));
}

TEST_CASE("paths inside the corridor keep the running integral close to the chord") {
  // |int_0^t G(X_r) dr - t int_0^1 G(psi)| <= sqrt(d) delta K t.
  CosineWell V;
  const auto noise = NoiseScale::from_sigma(1.0);
  const double x = -0.2, y = 0.6, t = 0.3;
  const double delta = default_delta(t);
  const auto box = density_constants_box(Point{x}, Point{y}, t, noise);
  const auto K = estimate_generator_constants(V, noise, box).K_lipschitz;
  const double chord = t * segment_generator_integral(V, noise, Point{x}, Point{y});
  int inside = 0;
  for (int k = 0; k < 2000; ++k) {
    NormalStream normals(RngPolicy{3}, k);
    const auto b = brownian_bridge(x, y, t, 1.0, 300, normals);
    bool in = true;
    double integral = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double r = static_cast<double>(i) / 300.0;
      if (std::abs(b[i] - ((1 - r) * x + r * y)) >= delta) in = false;
      integral += (i == 0 || i == 300 ? 0.5 : 1.0) *
                  generator_apply_to_self(V, noise, std::span(&b[i], 1)) * (t / 300);
    }
    if (!in) continue;
    ++inside;
    CHECK(std::abs(integral - chord) <= delta * K * t);
  }
  CHECK(inside > 1000);
}
