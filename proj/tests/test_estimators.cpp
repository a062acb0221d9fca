#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lrare/error.hpp"
#include "lrare/estimators.hpp"
#include "lrare/potential.hpp"
#include "support.hpp"

using namespace lrare;

namespace {

EstimatorSummary summarize(const std::vector<double>& v, std::size_t first,
                           std::size_t last) {
  EstimatorSummary s(EstimatorKind::importance);
  for (std::size_t i = first; i < last; ++i) s.add(v[i], v[i] != 0.0);
  return s;
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("plain summary matches the binomial formulas") {
  EstimatorSummary s;
  const int n = 1000, hits = 37;
  for (int i = 0; i < n; ++i) s.add(i < hits ? 1.0 : 0.0, i < hits);
  const double p = 0.037;
  CHECK(s.mean() == doctest::Approx(p));
  CHECK(s.variance() == doctest::Approx(p * (1 - p) * n / (n - 1)));
  CHECK(*s.lambda() == doctest::Approx(1.0 / p));
  CHECK(s.hits() == 37);
  EstimatorSummary none;
  for (int i = 0; i < 300; ++i) none.add(0.0, false);
  CHECK_FALSE(none.lambda().has_value());
  CHECK_FALSE(none.relative_error().has_value());
  CHECK(none.rule_of_three_upper() == doctest::Approx(0.01));
}

TEST_CASE("merging is exact, associative and commutative") {
  std::mt19937_64 rng(1);
  std::lognormal_distribution<double> w(-3.0, 2.0);
  std::bernoulli_distribution hit(0.3);
  std::vector<double> v(3000);
  for (double& x : v) x = hit(rng) ? w(rng) : 0.0;
  const auto all = summarize(v, 0, v.size());
  const auto a = summarize(v, 0, 700), b = summarize(v, 700, 2100),
             c = summarize(v, 2100, 3000);
  const auto left = EstimatorSummary::merge(EstimatorSummary::merge(a, b), c);
  const auto right = EstimatorSummary::merge(a, EstimatorSummary::merge(b, c));
  const auto swapped = EstimatorSummary::merge(c, EstimatorSummary::merge(b, a));
  for (const auto* s : {&left, &right, &swapped}) {
    CHECK(s->n() == all.n());
    CHECK(s->hits() == all.hits());
    CHECK(rel_close(s->mean(), all.mean(), 1e-12));
    CHECK(rel_close(s->variance(), all.variance(), 1e-12));
    CHECK(rel_close(*s->lambda(), *all.lambda(), 1e-12));
    CHECK(rel_close(s->sum_w4_ind(), all.sum_w4_ind(), 1e-12));
  }
  EstimatorSummary empty(EstimatorKind::importance);
  CHECK(EstimatorSummary::merge(empty, all).mean() == all.mean());
}

TEST_CASE("estimator formulas against exhaustive enumeration of a 3-state chain") {
  // Two steps of a chain on {0, 1, 2} started at 0; A = {X_2 = 2}.
  // P~ has dyadic probabilities so that replicating each path
  // 16 * P~(path) times gives a sample whose empirical law is exactly P~.
  const std::array<std::array<double, 3>, 3> P = {
      {{0.90, 0.08, 0.02}, {0.50, 0.45, 0.05}, {0.10, 0.10, 0.80}}};
  const std::array<std::array<double, 3>, 3> Q = {
      {{0.25, 0.25, 0.50}, {0.25, 0.25, 0.50}, {0.25, 0.25, 0.50}}};
  double pA = 0, second = 0;
  EstimatorSummary is(EstimatorKind::importance), plain;
  std::size_t plain_total = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const double p = P[0][a] * P[a][b];
      const double q = Q[0][a] * Q[a][b];
      const double w = p / q;
      const bool in_a = b == 2;
      if (in_a) {
        pA += p;
        second += q * w * w;
      }
      const auto copies = static_cast<int>(std::lround(16 * q));
      for (int c = 0; c < copies; ++c) is.add(in_a ? w : 0.0, in_a);
      // Plain estimator on the same dyadic trick with P rounded to 1/10000.
      const auto plain_copies = static_cast<int>(std::lround(10000 * p));
      plain_total += plain_copies;
      for (int c = 0; c < plain_copies; ++c) plain.add(in_a ? 1.0 : 0.0, in_a);
    }
  }
  const double n = 16;
  CHECK(rel_close(is.mean(), pA, 1e-12));
  CHECK(rel_close(is.variance(), (second - pA * pA) * n / (n - 1), 1e-12));
  CHECK(rel_close(*is.lambda(), second / (pA * pA), 1e-12));
  CHECK(rel_close(*is.relative_error(),
                  std::sqrt((second - pA * pA) * n / (n - 1) / n) / pA, 1e-12));
  CHECK(plain_total == 10000);
  CHECK(rel_close(plain.mean(), pA, 1e-12));
  CHECK(rel_close(plain.variance(), pA * (1 - pA) * 10000.0 / 9999.0, 1e-12));
  CHECK(rel_close(*plain.lambda(), 1.0 / pA, 1e-12));
}

TEST_CASE("everything escapes from the empty region") {
  CosineWell V;
  const auto grid = TimeGrid::make(1.0, 1e-2);
  RunOptions opt;
  opt.seed = 1;
  opt.workers = 1;
  const auto r = run_plain(V, NoiseScale::from_sigma(1.0), Point{0.0}, grid,
                           {parse_region("empty"), 1.0}, 100, opt);
  CHECK(r.summary.mean() == 1.0);
  CHECK(r.summary.variance() == 0.0);
}

TEST_CASE("Brownian escape from (-1, 1) matches the Gaussian tail") {
  ZeroPotential V;
  const auto grid = TimeGrid::make(1.0, 1e-2);
  RunOptions opt;
  opt.seed = 2;
  const auto r = run_plain(V, NoiseScale::from_sigma(1.0), Point{0.0}, grid,
                           {parse_region("interval:-1,1"), 1.0}, 100'000, opt);
  const double p = 2 * testing::normal_cdf(-1.0);
  CHECK(p == doctest::Approx(0.31731).epsilon(1e-4));
  CHECK(std::abs(r.summary.mean() - p) < 4 * r.summary.std_error());
}

TEST_CASE("sampling under V itself is plain Monte Carlo") {
  CosineWell V;
  const auto noise = NoiseScale::from_sigma(1.3);
  const auto grid = TimeGrid::make(1.0, 1e-2);
  const EscapeEvent ev{parse_region("interval:-2,2"), 1.0};
  RunOptions opt;
  opt.seed = 9;
  opt.keep_records = true;
  const auto plain = run_plain(V, noise, Point{0.0}, grid, ev, 5000, opt);
  const auto is = run_importance(V, V, noise, Point{0.0}, grid, 0.1, ev, 5000, opt);
  CHECK(is.summary.hits() == plain.summary.hits());
  CHECK(is.summary.mean() == plain.summary.mean());
  for (const auto& rec : is.records) CHECK(rec.log_weight == 0.0);
  const auto d = diagnostics(plain.summary, is.summary, V, V,
                             *ev.region, noise, Point{0.0}, 1.0);
  CHECK(*d.variance_ratio == doctest::Approx(1.0));
  CHECK(*d.lambda == doctest::Approx(1.0 / plain.summary.mean()));
}

TEST_CASE("results do not depend on the worker count") {
  CosineWell V;
  auto Vt = invert_on_region(std::make_shared<CosineWell>(), parse_region("interval:-pi,pi"));
  const auto grid = TimeGrid::make(1.0, 1e-2);
  const EscapeEvent ev{parse_region("interval:-pi,pi"), 1.0};
  RunOptions one, four;
  one.seed = four.seed = 4;
  one.workers = 1;
  four.workers = 4;
  one.block_size = four.block_size = 500;
  const auto noise = NoiseScale::from_sigma(1.0);
  const auto a = run_importance(V, *Vt, noise, Point{0.0}, grid, 0.1, ev, 3333, one);
  const auto b = run_importance(V, *Vt, noise, Point{0.0}, grid, 0.1, ev, 3333, four);
  CHECK(a.summary.mean() == b.summary.mean());
  CHECK(a.summary.variance() == b.summary.variance());
  CHECK(a.summary.sum_w2_ind() == b.summary.sum_w2_ind());
  const auto c = run_plain(V, noise, Point{0.0}, grid, ev, 3333, one);
  const auto d = run_plain(V, noise, Point{0.0}, grid, ev, 3333, four);
  CHECK(c.summary.mean() == d.summary.mean());
}

TEST_CASE("importance sampling is unbiased over repetitions") {
  // OU escape from (-2, 2) sampled under Brownian motion.
  QuadraticPotential V(1.0);
  ZeroPotential Vt;
  const auto noise = NoiseScale::from_sigma(1.0);
  const auto grid = TimeGrid::make(1.0, 1e-2);
  const EscapeEvent ev{parse_region("interval:-2,2"), 1.0};
  std::vector<double> pm, im;
  for (int rep = 0; rep < 20; ++rep) {
    RunOptions opt;
    opt.seed = 1000 + rep;
    pm.push_back(run_plain(V, noise, Point{0.0}, grid, ev, 10'000, opt).summary.mean());
    const auto is = run_importance(V, Vt, noise, Point{0.0}, grid, 1e-2, ev, 10'000, opt);
    im.push_back(is.summary.mean());
    if (is.summary.lambda_std_error())
      CHECK(*is.summary.lambda() >= 1.0 - 3.0 * *is.summary.lambda_std_error());
  }
  auto stats = [](const std::vector<double>& v) {
    double m = 0, s = 0;
    for (double x : v) m += x / v.size();
    for (double x : v) s += (x - m) * (x - m) / (v.size() - 1);
    return std::pair{m, std::sqrt(s / v.size())};
  };
  const auto [mp, sp] = stats(pm);
  const auto [mi, si] = stats(im);
  CHECK(std::abs(mp - mi) < 3 * std::sqrt(sp * sp + si * si));
}

TEST_CASE("variance bound exponent for the flattened cosine well") {
  PotentialPtr V = std::make_shared<CosineWell>();
  auto D = parse_region("interval:-pi,pi");
  auto A = flatten_on_region(V, D);
  auto B = invert_on_region(V, D);
  CHECK(variance_bound_exponent_M(*V, *A, *D) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(variance_bound_exponent_M(*V, *B, *D) == doctest::Approx(1.0).epsilon(1e-6));
  const auto noise = NoiseScale::from_sigma(1.0);
  CHECK(variance_ratio_bound(*V, *A, *D, noise, Point{0.0}, 1.0) ==
        doctest::Approx(std::exp(-1.5)).epsilon(1e-6));
  CHECK(variance_ratio_bound(*V, *B, *D, noise, Point{0.0}, 1.0) ==
        doctest::Approx(std::exp(-3.0)).epsilon(1e-6));
}

TEST_CASE("zero hits leave diagnostics undefined") {
  QuadraticPotential V(1.0);
  const auto grid = TimeGrid::make(0.1, 1e-2);
  const EscapeEvent ev{parse_region("interval:-50,50"), 0.1};
  RunOptions opt;
  const auto is = run_importance(V, V, NoiseScale::from_sigma(1.0), Point{0.0}, grid,
                                 1e-2, ev, 100, opt);
  const auto d = diagnostics(is.summary, V, V, *ev.region, NoiseScale::from_sigma(1.0),
                             Point{0.0}, 0.1);
  CHECK_FALSE(d.defined);
  CHECK_FALSE(d.lambda.has_value());
  CHECK(is.summary.rule_of_three_upper() == doctest::Approx(0.03));
}

TEST_CASE("small-noise sweep with V~ = V tracks -eps log p") {
  CosineWell V;
  SweepSettings s;
  s.epsilons = {1.0, 0.5};
  s.step = 1e-2;
  s.tau = 1e-2;
  s.samples = 20'000;
  s.run.seed = 3;
  const auto rows = small_noise_sweep(V, V, parse_region("interval:-1.5,1.5"),
                                      Point{0.0}, s);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    REQUIRE(r.defined);
    CHECK(*r.eps_log_lambda == doctest::Approx(-r.epsilon * std::log(*r.p_hat)));
  }
  s.epsilons = {0.5, 1.0};
  CHECK_THROWS_AS(small_noise_sweep(V, V, parse_region("interval:-1,1"), Point{0.0}, s),
                  ConfigError);
}
