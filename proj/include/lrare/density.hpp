#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "lrare/noise.hpp"
#include "lrare/potential.hpp"

namespace lrare {

// rho_t(x) = (2 pi sigma^2 t)^(-d/2) exp(-|x|^2 / (2 sigma^2 t)).
double gaussian_kernel(std::span<const double> x, double t, double sigma);

// Composite Simpson rule for int_0^1 f(r) dr with `nodes` points (forced
// odd, at least 3).
template <class F>
double simpson_unit_interval(F&& f, std::size_t nodes);

// int_0^1 (L_V + L_0)V((1 - r) x + r y) dr.
double segment_generator_integral(const Potential& V, const NoiseScale& noise,
                                  std::span<const double> x,
                                  std::span<const double> y,
                                  std::size_t nodes = 101);

// Short-time approximation of the transition density p_t(x, y):
// exp[sigma^-2 (V(x) - V(y) + t/2 int_0^1 (L_V + L_0)V(psi(r)) dr)] rho_t(y - x).
double approximate(const Potential& V, const NoiseScale& noise,
                   std::span<const double> x, std::span<const double> y,
                   double t, std::size_t nodes = 101);

struct DensityConstants {
  double M1 = 0.0;
  double M2 = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double K_lipschitz = 0.0;
  double sup_abs_generator = 0.0;
};

struct DensityBounds {
  double lower = 0.0;
  double upper = 0.0;
  DensityConstants constants;
};

struct DensityEstimate {
  double approx = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  DensityConstants constants;
  double t = 0.0;
  Point x;
  Point y;
  double sigma = 0.0;
};

// Local constants of G = (L_V + L_0)V on a box.
struct GeneratorConstants {
  double K_lipschitz = 0.0;  // grid max of |grad G| times the safety factor
  double sup_abs = 0.0;      // grid max of |G|
};

inline constexpr double kLipschitzSafetyFactor = 1.2;

GeneratorConstants estimate_generator_constants(
    const Potential& V, const NoiseScale& noise, const Box& box,
    std::size_t per_axis = 0, double safety = kLipschitzSafetyFactor);

// Hull of {x, y} inflated by 3 sigma sqrt(t) in every coordinate.
Box density_constants_box(std::span<const double> x, std::span<const double> y,
                          double t, const NoiseScale& noise);

// Default corridor half-width delta = t^alpha.
double default_delta(double t, double alpha = 0.4);

// Certified bracket around p_t(x, y) for a given corridor width delta and
// Lipschitz constant K of (L_V + L_0)V. sup|(L_V + L_0)V| is estimated on
// density_constants_box unless supplied. lower is clamped at 0.
DensityBounds bounds(const Potential& V, const NoiseScale& noise,
                     std::span<const double> x, std::span<const double> y,
                     double t, double delta, double K_lipschitz,
                     std::optional<double> sup_abs_generator = std::nullopt,
                     std::size_t nodes = 101);

struct DensityOptions {
  std::size_t nodes = 101;
  double alpha = 0.4;
  std::optional<double> delta;
  std::optional<double> K_lipschitz;
  std::optional<double> sup_abs_generator;
  std::size_t grid_per_axis = 0;
};

// approximate() plus bounds() with the constants estimated on the inflated
// box when not given.
DensityEstimate estimate_density(const Potential& V, const NoiseScale& noise,
                                 std::span<const double> x,
                                 std::span<const double> y, double t,
                                 const DensityOptions& options = {});

// Drift-F generalization: exp[sigma^-2 (V(x) - V(y) + t/2 int_0^1
// (L_V - L_0 + 2L^ref)V(psi(r)) dr)] * p_ref, with p_ref the caller's
// reference density p_t^ref(x, y).
double approximate_general(const Potential& V, const DriftField& F,
                           const NoiseScale& noise, std::span<const double> x,
                           std::span<const double> y, double t, double p_ref,
                           std::size_t nodes = 101);

// Upper bound 2d exp(-2 delta^2 / (sigma^2 t)) on the probability that a
// Brownian bridge from x to y leaves the delta-corridor around the chord.
double corridor_violation_bound(std::size_t d, double sigma, double t,
                                double delta);

// ---------------------------------------------------------------------------

template <class F>
double simpson_unit_interval(F&& f, std::size_t nodes) {
  if (nodes < 3) nodes = 3;
  if (nodes % 2 == 0) ++nodes;
  const std::size_t intervals = nodes - 1;
  const double step = 1.0 / static_cast<double>(intervals);
  double sum = f(0.0) + f(1.0);
  for (std::size_t i = 1; i < intervals; ++i)
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(static_cast<double>(i) * step);
  return sum * step / 3.0;
}

}  // namespace lrare
