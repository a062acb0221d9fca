#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lrare/noise.hpp"
#include "lrare/potential.hpp"
#include "lrare/region.hpp"

namespace lrare {

// Flat key=value experiment description. Lines starting with '#' and blank
// lines are ignored; unknown keys are rejected. The documented key list
// (see keys()) is the whole contract.
struct ExperimentConfig {
  std::string mode = "plain";
  std::string potential = "cosine_well";
  // "invert(D)", "flatten(D)", "same", or any built-in potential name.
  std::string sampling_potential = "invert(D)";
  std::size_t dim = 1;
  double sigma = 1.0;
  Point x0 = {0.0};
  double T = 1.0;
  double h = 1e-3;
  double tau = 1e-2;
  std::size_t N = 100'000;
  std::size_t plain_N = 0;  // 0: importance mode skips the plain run
  std::uint64_t seed = 1;
  std::string region = "interval:-pi,pi";
  // density mode
  Point y = {0.5};
  double t = 0.1;
  double alpha = 0.4;
  std::size_t quadrature_nodes = 101;
  // fp mode
  double fp_dx = 0.005;
  double fp_dt = 1e-3;
  std::string density_dump;
  // action mode and sweep
  std::size_t knots = 200;
  std::size_t restarts = 1;
  std::size_t max_iterations = 10'000;
  // sweep and table5
  std::vector<double> epsilons = {1.0, 0.5, 0.25};
  std::vector<double> taus = {1e-1, 1e-2, 1e-3};
  // sampling grid points per axis for suprema over D (0: default)
  std::size_t sup_grid = 0;

  static const std::vector<std::string>& keys();

  // Throws ConfigError naming the key.
  void set(std::string_view key, std::string_view value);
  // Applies every line of `text`; errors carry "<source>:<line>".
  void merge(std::string_view text, std::string_view source = "<config>");
  static ExperimentConfig parse(std::string_view text,
                                std::string_view source = "<config>");
  static ExperimentConfig load(const std::string& path);

  // Cross-field checks (dimensions, tau a multiple of h, ...).
  void check() const;
  // Resolved configuration in the input format; parse(echo()) == *this.
  std::string echo() const;

  NoiseScale noise() const { return NoiseScale::from_sigma(sigma); }
  RegionPtr region_ptr() const;
  PotentialPtr potential_ptr() const;
  PotentialPtr sampling_potential_ptr() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Runs the configured mode and returns the CSV report. `workers` = 0 uses
// default_worker_count().
std::string run_experiment(const ExperimentConfig& config,
                           std::size_t workers = 0);

// Hypothesis checks for the sampling potential; never throws for a failed
// check, only for an unusable config. CSV: check,status,value,detail.
std::string validate_experiment(const ExperimentConfig& config);

}  // namespace lrare
