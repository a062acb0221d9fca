#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lrare/error.hpp"
#include "lrare/noise.hpp"
#include "lrare/potential.hpp"
#include "lrare/rng.hpp"

namespace lrare {

// Uniform grid 0 = t_0 < ... < t_n = horizon with t_i = i * step.
struct TimeGrid {
  double horizon = 0.0;
  double step = 0.0;
  std::size_t steps = 0;
  // Set when horizon / step was not an integer and the horizon was rounded
  // up to steps * step.
  bool rounded = false;

  static TimeGrid make(double horizon, double step);
  double time(std::size_t i) const { return static_cast<double>(i) * step; }
};

// Discretized trajectory with the unit Gaussian increments that produced
// it. States and increments are stored flat, `dimension` values per entry.
struct SamplePath {
  std::size_t dimension = 0;
  TimeGrid grid;
  NoiseScale noise = NoiseScale::from_sigma(1.0);
  std::vector<double> states;      // (steps + 1) * dimension
  std::vector<double> increments;  // steps * dimension, may be empty

  std::size_t size() const { return grid.steps + 1; }
  std::span<const double> state(std::size_t i) const {
    return {states.data() + i * dimension, dimension};
  }
  std::span<const double> increment(std::size_t i) const {
    return {increments.data() + i * dimension, dimension};
  }
  std::span<const double> initial() const { return state(0); }
  std::span<const double> terminal() const { return state(grid.steps); }
  bool has_increments() const {
    return increments.size() == grid.steps * dimension && grid.steps > 0;
  }
  std::vector<double> times() const;
};

// Euler-Maruyama for dX = (-grad V(X) + F(X)) dt + sigma dW, streaming:
// visit(i, x_i, xi_i) is called before step i with the state at t_i and
// the unit normal increment about to be applied. On return `state` holds
// the terminal value. F may be null (no reference drift).
template <class Visitor>
void integrate(const Potential& V, const DriftField* F, const NoiseScale& noise,
               const TimeGrid& grid, NormalStream& normals,
               std::span<double> state, Visitor&& visit);

// Stores the full path.
SamplePath simulate(const Potential& V, const NoiseScale& noise,
                    std::span<const double> x0, const TimeGrid& grid,
                    NormalStream& normals);

SamplePath simulate_with_drift(const Potential& V, const DriftField& F,
                               const NoiseScale& noise,
                               std::span<const double> x0,
                               const TimeGrid& grid, NormalStream& normals);

// ---------------------------------------------------------------------------

template <class Visitor>
void integrate(const Potential& V, const DriftField* F, const NoiseScale& noise,
               const TimeGrid& grid, NormalStream& normals,
               std::span<double> state, Visitor&& visit) {
  const std::size_t d = state.size();
  const double h = grid.step;
  const double scale = noise.sigma() * std::sqrt(h);
  if (d == 1 && F == nullptr) {
    // Scalar fast path of the general loop below.
    double x = state[0];
    double g = 0.0;
    double xi = 0.0;
    for (std::size_t i = 0; i < grid.steps; ++i) {
      xi = normals();
      visit(i, std::span<const double>(&x, 1), std::span<const double>(&xi, 1));
      V.gradient(std::span<const double>(&x, 1), std::span<double>(&g, 1));
      x = x - g * h + scale * xi;
      if (!std::isfinite(x))
        throw SimulationError("Euler-Maruyama produced a non-finite state at "
                              "step " + std::to_string(i + 1),
                              i + 1);
    }
    state[0] = x;
    return;
  }
  std::vector<double> g(d), f(d), xi(d);
  for (std::size_t i = 0; i < grid.steps; ++i) {
    normals.fill(xi);
    visit(i, std::span<const double>(state), std::span<const double>(xi));
    V.gradient(state, g);
    if (F != nullptr) (*F)(state, f);
    for (std::size_t k = 0; k < d; ++k) {
      const double drift = F != nullptr ? f[k] - g[k] : -g[k];
      state[k] = state[k] + drift * h + scale * xi[k];
      if (!std::isfinite(state[k]))
        throw SimulationError("Euler-Maruyama produced a non-finite state at "
                              "step " + std::to_string(i + 1),
                              i + 1);
    }
  }
}

}  // namespace lrare
