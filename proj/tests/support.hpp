#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lrare/rng.hpp"

namespace lrare::testing {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Exact N(mean, var) density.
inline double normal_pdf(double x, double mean, double var) {
  const double z = x - mean;
  return std::exp(-z * z / (2.0 * var)) / std::sqrt(2.0 * std::acos(-1.0) * var);
}

// Exact Ornstein-Uhlenbeck transition density for V = k x^2 / 2.
inline double ou_density(double x, double y, double t, double k, double sigma) {
  const double mean = x * std::exp(-k * t);
  const double var = sigma * sigma * (1.0 - std::exp(-2.0 * k * t)) / (2.0 * k);
  return normal_pdf(y, mean, var);
}

// One-dimensional Brownian bridge from x at 0 to y at t, sampled at
// `steps` + 1 equally spaced times by conditioning each increment on the
// endpoint.
inline std::vector<double> brownian_bridge(double x, double y, double t,
                                           double sigma, std::size_t steps,
                                           NormalStream& normals) {
  std::vector<double> b(steps + 1);
  b[0] = x;
  const double dt = t / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double left = t - static_cast<double>(k) * dt;
    const double after = left - dt;
    const double mean = b[k] + (y - b[k]) * dt / left;
    const double sd = sigma * std::sqrt(dt * after / left);
    b[k + 1] = mean + sd * normals();
  }
  b[steps] = y;
  return b;
}

// Does a bridge with the given grid values leave (chord - delta, chord +
// delta) at some time? Between grid points the deviation from the chord is
// again a Brownian bridge, so crossings of each level are added with their
// exact conditional probability exp(-2 (L - u)(L - v) / (sigma^2 dt)).
inline bool leaves_corridor(const std::vector<double>& b, double x, double y,
                            double t, double sigma, double delta,
                            NormalStream& normals) {
  const std::size_t steps = b.size() - 1;
  const double dt = t / static_cast<double>(steps);
  auto dev = [&](std::size_t k) {
    const double r = static_cast<double>(k) / static_cast<double>(steps);
    return b[k] - ((1.0 - r) * x + r * y);
  };
  for (std::size_t k = 0; k < steps; ++k) {
    const double u = dev(k);
    const double v = dev(k + 1);
    if (std::abs(u) >= delta || std::abs(v) >= delta) return true;
    const double s2dt = sigma * sigma * dt;
    const double up = std::exp(-2.0 * (delta - u) * (delta - v) / s2dt);
    const double down = std::exp(-2.0 * (delta + u) * (delta + v) / s2dt);
    if (normals.uniform() < up + down) return true;
  }
  return false;
}

// P(sup_[0,t] |bridge - chord| >= delta) for a one-dimensional Brownian
// bridge (Kolmogorov series).
inline double bridge_exit_probability(double sigma, double t, double delta) {
  double s = 0.0;
  for (int k = 1; k <= 50; ++k)
    s += (k % 2 == 1 ? 2.0 : -2.0) *
         std::exp(-2.0 * k * k * delta * delta / (sigma * sigma * t));
  return s;
}

}  // namespace lrare::testing
