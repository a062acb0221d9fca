#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrare/noise.hpp"
#include "lrare/potential.hpp"
#include "lrare/region.hpp"
#include "lrare/sde.hpp"

namespace lrare {

// A = {X_T not in D}.
struct EscapeEvent {
  RegionPtr region;
  double horizon = 1.0;

  bool operator()(std::span<const double> terminal) const {
    return !region->contains(terminal);
  }
};

enum class EstimatorKind { plain, importance };

// Streaming statistics of the per-sample values w * 1_A (w = 1 for plain
// Monte Carlo). Welford mean/M2 plus raw power sums up to the fourth,
// which feed the standard errors of the variance and of Lambda.
class EstimatorSummary {
 public:
  explicit EstimatorSummary(EstimatorKind kind = EstimatorKind::plain)
      : kind_(kind) {}

  void add(double weighted_indicator, bool hit);
  static EstimatorSummary merge(const EstimatorSummary& a,
                                const EstimatorSummary& b);
  void merge_in(const EstimatorSummary& other) { *this = merge(*this, other); }

  EstimatorKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  std::size_t hits() const { return hits_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  double sum_w_ind() const { return s1_; }
  double sum_w2_ind() const { return s2_; }
  double sum_w3_ind() const { return s3_; }
  double sum_w4_ind() const { return s4_; }

  // Unbiased per-sample variance m2 / (n - 1); 0 when n < 2.
  double variance() const;
  double std_error() const;
  // Standard error of the sample variance (normal-theory with the
  // observed fourth central moment).
  double variance_std_error() const;
  // sqrt(variance / n) / mean; empty when mean == 0.
  std::optional<double> relative_error() const;
  // (sum w^2 1_A / n) / mean^2; empty when mean == 0.
  std::optional<double> lambda() const;
  std::optional<double> lambda_std_error() const;
  // One-sided 95% upper bound for p when no hits were observed.
  double rule_of_three_upper() const;

 private:
  EstimatorKind kind_;
  std::size_t n_ = 0;
  std::size_t hits_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double s1_ = 0.0;
  double s2_ = 0.0;
  double s3_ = 0.0;
  double s4_ = 0.0;
};

struct SampleRecord {
  bool hit = false;
  double log_weight = 0.0;
};

// Number of workers used when RunOptions::workers == 0: the LRARE_WORKERS
// environment variable if set, else the hardware concurrency.
std::size_t default_worker_count();

struct RunOptions {
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  // Samples are summarized in fixed blocks that are merged in block order,
  // which makes every result independent of the worker count.
  std::size_t block_size = 4096;
  bool keep_records = false;
};

struct RunResult {
  EstimatorSummary summary;
  std::vector<SampleRecord> records;  // filled when keep_records
  std::size_t clamped_weights = 0;    // log-weights above log(1e300)
};

// Exponentiated log-weights are clamped at this value.
inline constexpr double kMaxLogWeight = 690.7755278982137;  // log(1e300)

RunResult run_plain(const Potential& V, const NoiseScale& noise,
                    std::span<const double> x0, const TimeGrid& grid,
                    const EscapeEvent& event, std::size_t N,
                    const RunOptions& options);

// Samples under Vtilde and weights each escaping path by
// exp(log_weight_generator_form) on the tau-mesh.
RunResult run_importance(const Potential& V, const Potential& Vtilde,
                         const NoiseScale& noise, std::span<const double> x0,
                         const TimeGrid& grid, double tau,
                         const EscapeEvent& event, std::size_t N,
                         const RunOptions& options);

// M = 1/2 sup_{x in D} (Lap V(x) - Lap V~(x)) by grid sampling.
double variance_bound_exponent_M(const Potential& V, const Potential& Vtilde,
                                 const Region& D, std::size_t per_axis = 0);

// exp(eps^-1 (V(x0) - V~(x0)) + T M).
double variance_ratio_bound(const Potential& V, const Potential& Vtilde,
                            const Region& D, const NoiseScale& noise,
                            std::span<const double> x0, double T,
                            std::size_t per_axis = 0);

struct Diagnostics {
  bool defined = false;  // false when the importance run has no hits
  std::optional<double> relative_error;
  std::optional<double> lambda;
  std::optional<double> lambda_std_error;
  std::optional<double> variance_ratio;
  std::optional<double> variance_ratio_relative_se;
  double M = 0.0;
  double theorem3_bound = 0.0;
};

// Relative error, Lambda and the variance ratio of an importance run
// against a plain run, plus the variance-ratio bound.
Diagnostics diagnostics(const EstimatorSummary& plain,
                        const EstimatorSummary& importance, const Potential& V,
                        const Potential& Vtilde, const Region& D,
                        const NoiseScale& noise, std::span<const double> x0,
                        double T);

// Same, with Var(1_A) = p(1 - p) evaluated at the importance estimate.
Diagnostics diagnostics(const EstimatorSummary& importance, const Potential& V,
                        const Potential& Vtilde, const Region& D,
                        const NoiseScale& noise, std::span<const double> x0,
                        double T);

struct SweepRow {
  double epsilon = 0.0;
  std::size_t n = 0;
  std::size_t hits = 0;
  bool defined = false;
  std::optional<double> p_hat;
  std::optional<double> lambda;
  std::optional<double> lambda_std_error;
  std::optional<double> eps_log_lambda;
  // V(x0) - V~(x0) + I_V(x0): the small-noise limit bound on eps log Lambda.
  double predicted_limit = 0.0;
  std::string note;
};

struct SweepSettings {
  std::vector<double> epsilons;  // strictly decreasing
  double horizon = 1.0;
  double step = 1e-3;
  double tau = 1e-2;
  std::size_t samples = 100'000;
  double rate_function = 0.0;  // I_V(x0), e.g. from minimize_exit_action
  RunOptions run;
};

std::vector<SweepRow> small_noise_sweep(const Potential& V,
                                        const Potential& Vtilde,
                                        const RegionPtr& D,
                                        std::span<const double> x0,
                                        const SweepSettings& settings);

}  // namespace lrare
