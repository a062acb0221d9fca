#include "lrare/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "lrare/detail/parallel.hpp"
#include "lrare/error.hpp"
#include "lrare/girsanov.hpp"

namespace lrare {

void EstimatorSummary::add(double value, bool hit) {
  ++n_;
  if (hit) ++hits_;
  const double delta = value - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (value - mean_);
  const double v2 = value * value;
  s1_ += value;
  s2_ += v2;
  s3_ += v2 * value;
  s4_ += v2 * v2;
}

EstimatorSummary EstimatorSummary::merge(const EstimatorSummary& a,
                                         const EstimatorSummary& b) {
  if (a.n_ == 0) return b;
  if (b.n_ == 0) return a;
  EstimatorSummary out(a.kind_);
  out.n_ = a.n_ + b.n_;
  out.hits_ = a.hits_ + b.hits_;
  const double na = static_cast<double>(a.n_);
  const double nb = static_cast<double>(b.n_);
  const double n = static_cast<double>(out.n_);
  const double delta = b.mean_ - a.mean_;
  out.mean_ = a.mean_ + delta * nb / n;
  out.m2_ = a.m2_ + b.m2_ + delta * delta * na * nb / n;
  out.s1_ = a.s1_ + b.s1_;
  out.s2_ = a.s2_ + b.s2_;
  out.s3_ = a.s3_ + b.s3_;
  out.s4_ = a.s4_ + b.s4_;
  return out;
}

double EstimatorSummary::variance() const {
  if (n_ < 2) return 0.0;
  return std::max(0.0, m2_ / static_cast<double>(n_ - 1));
}

double EstimatorSummary::std_error() const {
  if (n_ == 0) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n_));
}

double EstimatorSummary::variance_std_error() const {
  if (n_ < 4) return 0.0;
  const double n = static_cast<double>(n_);
  const double e1 = s1_ / n;
  const double e2 = s2_ / n;
  const double e3 = s3_ / n;
  const double e4 = s4_ / n;
  const double mu4 =
      e4 - 4.0 * e1 * e3 + 6.0 * e1 * e1 * e2 - 3.0 * e1 * e1 * e1 * e1;
  const double var = variance();
  const double v = (mu4 - var * var * (n - 3.0) / (n - 1.0)) / n;
  return std::sqrt(std::max(0.0, v));
}

std::optional<double> EstimatorSummary::relative_error() const {
  if (!(mean_ > 0.0)) return std::nullopt;
  return std_error() / mean_;
}

std::optional<double> EstimatorSummary::lambda() const {
  if (!(mean_ > 0.0) || n_ == 0) return std::nullopt;
  return (s2_ / static_cast<double>(n_)) / (mean_ * mean_);
}

std::optional<double> EstimatorSummary::lambda_std_error() const {
  if (!(mean_ > 0.0) || n_ < 2) return std::nullopt;
  // Delta method for (mean of w^2) / (mean of w)^2.
  const double n = static_cast<double>(n_);
  const double a = s1_ / n;
  const double b = s2_ / n;
  const double e3 = s3_ / n;
  const double e4 = s4_ / n;
  const double var_w = b - a * a;
  const double var_w2 = e4 - b * b;
  const double cov = e3 - a * b;
  const double db = 1.0 / (a * a);
  const double da = -2.0 * b / (a * a * a);
  const double v = (db * db * var_w2 + da * da * var_w + 2.0 * da * db * cov) / n;
  return std::sqrt(std::max(0.0, v));
}

double EstimatorSummary::rule_of_three_upper() const {
  return n_ == 0 ? 1.0 : std::min(1.0, 3.0 / static_cast<double>(n_));
}

// ---------------------------------------------------------------------------

std::size_t default_worker_count() {
  if (const char* env = std::getenv("LRARE_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    std::fprintf(stderr, "lrare: warning: ignoring invalid LRARE_WORKERS='%s'\n",
                 env);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct BlockOutcome {
  EstimatorSummary summary;
  std::size_t clamped = 0;
};

std::size_t resolve_workers(const RunOptions& options) {
  return options.workers == 0 ? default_worker_count() : options.workers;
}

void check_run(const Potential& V, std::span<const double> x0,
               const EscapeEvent& event, std::size_t N) {
  if (N < 2) throw ConfigError("estimator needs N >= 2 samples");
  if (x0.size() != V.dimension())
    throw PreconditionError("x0 dimension does not match the potential");
  if (!event.region || event.region->dimension() != V.dimension())
    throw PreconditionError("escape region dimension does not match the potential");
}

template <class SampleFn>
RunResult run_samples(EstimatorKind kind, std::size_t N,
                      const RunOptions& options, SampleFn&& sample) {
  RunResult result;
  result.summary = EstimatorSummary(kind);
  if (options.keep_records) result.records.resize(N);
  auto blocks = detail::run_blocks<BlockOutcome>(
      N, options.block_size, resolve_workers(options),
      [&](std::size_t, std::size_t first, std::size_t last) {
        BlockOutcome out;
        out.summary = EstimatorSummary(kind);
        for (std::size_t k = first; k < last; ++k) {
          SampleRecord rec;
          try {
            rec = sample(k);
          } catch (const SimulationError& e) {
            throw SimulationError(std::string(e.what()) + " in sample " +
                                      std::to_string(k),
                                  e.step(), k);
          }
          double value = 0.0;
          if (rec.hit) {
            double lw = rec.log_weight;
            if (lw > kMaxLogWeight) {
              lw = kMaxLogWeight;
              ++out.clamped;
            }
            value = std::exp(lw);
          }
          out.summary.add(value, rec.hit);
          if (options.keep_records) result.records[k] = rec;
        }
        return out;
      });
  for (const auto& b : blocks) {
    result.summary.merge_in(b.summary);
    result.clamped_weights += b.clamped;
  }
  if (result.clamped_weights > 0)
    std::fprintf(stderr,
                 "lrare: warning: %zu importance weights exceeded 1e300 and "
                 "were clamped\n",
                 result.clamped_weights);
  return result;
}

}  // namespace

RunResult run_plain(const Potential& V, const NoiseScale& noise,
                    std::span<const double> x0, const TimeGrid& grid,
                    const EscapeEvent& event, std::size_t N,
                    const RunOptions& options) {
  check_run(V, x0, event, N);
  const RngPolicy policy{options.seed};
  const Point start(x0.begin(), x0.end());
  return run_samples(EstimatorKind::plain, N, options, [&](std::size_t k) {
    NormalStream normals(policy, k);
    Point state = start;
    integrate(V, nullptr, noise, grid, normals, state,
              [](std::size_t, std::span<const double>, std::span<const double>) {});
    return SampleRecord{event(state), 0.0};
  });
}

RunResult run_importance(const Potential& V, const Potential& Vtilde,
                         const NoiseScale& noise, std::span<const double> x0,
                         const TimeGrid& grid, double tau,
                         const EscapeEvent& event, std::size_t N,
                         const RunOptions& options) {
  check_run(V, x0, event, N);
  if (Vtilde.dimension() != V.dimension())
    throw PreconditionError("sampling potential dimension does not match");
  // Validates tau against h and sigma > 0 up front.
  GeneratorWeightAccumulator probe(V, Vtilde, noise, grid, tau);
  const RngPolicy policy{options.seed};
  const Point start(x0.begin(), x0.end());
  return run_samples(EstimatorKind::importance, N, options, [&](std::size_t k) {
    NormalStream normals(policy, k);
    GeneratorWeightAccumulator acc(V, Vtilde, noise, grid, tau);
    Point state = start;
    integrate(Vtilde, nullptr, noise, grid, normals, state,
              [&](std::size_t i, std::span<const double> x,
                  std::span<const double>) { acc.observe(i, x); });
    const bool hit = event(state);
    // The weight only matters on the event.
    const double lw = hit ? acc.finish(start, state).log_value : 0.0;
    return SampleRecord{hit, lw};
  });
}

// ---------------------------------------------------------------------------

double variance_bound_exponent_M(const Potential& V, const Potential& Vtilde,
                                 const Region& D, std::size_t per_axis) {
  const double sup = sup_over_region(
      D,
      [&](std::span<const double> x) {
        return V.laplacian(x) - Vtilde.laplacian(x);
      },
      per_axis);
  if (!std::isfinite(sup)) return 0.0;  // empty D
  return 0.5 * sup;
}

double variance_ratio_bound(const Potential& V, const Potential& Vtilde,
                            const Region& D, const NoiseScale& noise,
                            std::span<const double> x0, double T,
                            std::size_t per_axis) {
  if (noise.degenerate()) throw DomainError("variance bound needs epsilon > 0");
  const double M = variance_bound_exponent_M(V, Vtilde, D, per_axis);
  return std::exp((V.value(x0) - Vtilde.value(x0)) / noise.epsilon() + T * M);
}

namespace {

Diagnostics base_diagnostics(const EstimatorSummary& importance,
                             const Potential& V, const Potential& Vtilde,
                             const Region& D, const NoiseScale& noise,
                             std::span<const double> x0, double T) {
  if (importance.n() == 0)
    throw PreconditionError("diagnostics need a non-empty importance run");
  Diagnostics d;
  d.M = variance_bound_exponent_M(V, Vtilde, D);
  d.theorem3_bound =
      std::exp((V.value(x0) - Vtilde.value(x0)) / noise.epsilon() + T * d.M);
  d.defined = importance.mean() > 0.0;
  if (!d.defined) return d;
  d.relative_error = importance.relative_error();
  d.lambda = importance.lambda();
  d.lambda_std_error = importance.lambda_std_error();
  return d;
}

double relative_variance_se(const EstimatorSummary& s) {
  const double var = s.variance();
  return var > 0.0 ? s.variance_std_error() / var : 0.0;
}

}  // namespace

Diagnostics diagnostics(const EstimatorSummary& plain,
                        const EstimatorSummary& importance, const Potential& V,
                        const Potential& Vtilde, const Region& D,
                        const NoiseScale& noise, std::span<const double> x0,
                        double T) {
  if (plain.n() == 0)
    throw PreconditionError("diagnostics need a non-empty plain run");
  Diagnostics d = base_diagnostics(importance, V, Vtilde, D, noise, x0, T);
  if (!d.defined || !(plain.variance() > 0.0)) return d;
  d.variance_ratio = importance.variance() / plain.variance();
  const double ri = relative_variance_se(importance);
  const double rp = relative_variance_se(plain);
  d.variance_ratio_relative_se = std::sqrt(ri * ri + rp * rp);
  return d;
}

Diagnostics diagnostics(const EstimatorSummary& importance, const Potential& V,
                        const Potential& Vtilde, const Region& D,
                        const NoiseScale& noise, std::span<const double> x0,
                        double T) {
  Diagnostics d = base_diagnostics(importance, V, Vtilde, D, noise, x0, T);
  if (!d.defined) return d;
  const double p = importance.mean();
  const double var_indicator = p * (1.0 - p);
  if (var_indicator > 0.0) {
    d.variance_ratio = importance.variance() / var_indicator;
    d.variance_ratio_relative_se = relative_variance_se(importance);
  }
  return d;
}

// ---------------------------------------------------------------------------

std::vector<SweepRow> small_noise_sweep(const Potential& V,
                                        const Potential& Vtilde,
                                        const RegionPtr& D,
                                        std::span<const double> x0,
                                        const SweepSettings& settings) {
  if (settings.epsilons.empty()) throw ConfigError("sweep needs epsilons");
  for (std::size_t i = 0; i < settings.epsilons.size(); ++i) {
    if (!(settings.epsilons[i] > 0.0))
      throw ConfigError("sweep epsilons must be > 0");
    if (i > 0 && !(settings.epsilons[i] < settings.epsilons[i - 1]))
      throw ConfigError("sweep epsilons must be strictly decreasing");
  }
  const TimeGrid grid = TimeGrid::make(settings.horizon, settings.step);
  const EscapeEvent event{D, grid.horizon};
  const double predicted = V.value(x0) - Vtilde.value(x0) + settings.rate_function;

  std::vector<SweepRow> rows;
  for (double eps : settings.epsilons) {
    const NoiseScale noise = NoiseScale::from_epsilon(eps);
    const auto run = run_importance(V, Vtilde, noise, x0, grid, settings.tau,
                                    event, settings.samples, settings.run);
    SweepRow row;
    row.epsilon = eps;
    row.n = run.summary.n();
    row.hits = run.summary.hits();
    row.predicted_limit = predicted;
    row.defined = run.summary.mean() > 0.0;
    if (row.defined) {
      row.p_hat = run.summary.mean();
      row.lambda = run.summary.lambda();
      row.lambda_std_error = run.summary.lambda_std_error();
      row.eps_log_lambda = eps * std::log(*row.lambda);
    } else {
      row.note = "no hits; p <= " + std::to_string(run.summary.rule_of_three_upper()) +
                 " (rule of three)";
    }
    if (row.hits < 100) {
      if (!row.note.empty()) row.note += "; ";
      row.note += "fewer than 100 hits";
      std::fprintf(stderr,
                   "lrare: warning: sweep at epsilon=%g recorded only %zu hits\n",
                   eps, row.hits);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lrare
