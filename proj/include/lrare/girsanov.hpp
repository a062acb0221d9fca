#pragma once

#include <cstddef>
#include <span>

#include "lrare/noise.hpp"
#include "lrare/potential.hpp"
#include "lrare/sde.hpp"

namespace lrare {

// Natural log of dP/dP~ along one path. For the generator form
// log_value = boundary_term + running_integral.
struct LogWeight {
  double log_value = 0.0;
  double boundary_term = 0.0;
  double running_integral = 0.0;
  double mesh = 0.0;
};

// Riemann mesh tau laid over the simulation grid: tau = stride * h.
struct RiemannMesh {
  std::size_t stride = 1;
  double tau = 0.0;

  // Throws ConfigError unless tau is a positive integer multiple of h.
  static RiemannMesh make(double tau, const TimeGrid& grid);
  // Width of the Riemann cell that starts at simulation step i (i must be
  // a multiple of stride).
  double width(std::size_t i, const TimeGrid& grid) const;
};

// Generator form. Left-endpoint Riemann sum on the tau-grid of
// sigma^-2 * 1/2 * [(L_V + L_0)V - (L_V~ + L_0)V~], plus the exact
// boundary term sigma^-2 [V(x0) - V(X_T) - (V~(x0) - V~(X_T))].
// The path is expected to come from the V~ dynamics.
LogWeight log_weight_generator_form(const SamplePath& path, const Potential& V,
                                    const Potential& Vtilde, double tau);

// Ito-sum oracle: sigma^-1 sum grad U(X_i) . sqrt(h) xi_i
//                 - sigma^-2 / 2 sum |grad U(X_i)|^2 h,  with U = V~ - V.
// All of it is reported as running_integral; boundary_term is 0.
LogWeight log_weight_stochastic_integral_form(const SamplePath& path,
                                              const Potential& V,
                                              const Potential& Vtilde);

// Weight of the -grad V + F dynamics against the reference dX = F dt +
// sigma dW: sigma^-2 (V(x0) - V(X_T) + 1/2 int (L_V - L_0 + 2L^ref)V ds).
LogWeight log_weight_general_reference(const SamplePath& path,
                                       const Potential& V, const DriftField& F,
                                       double tau);

// Streaming version of the generator form for use inside integrate().
class GeneratorWeightAccumulator {
 public:
  GeneratorWeightAccumulator(const Potential& V, const Potential& Vtilde,
                             const NoiseScale& noise, const TimeGrid& grid,
                             double tau);

  void observe(std::size_t step, std::span<const double> x) {
    if (step % mesh_.stride == 0) accumulate(step, x);
  }
  LogWeight finish(std::span<const double> x0,
                   std::span<const double> terminal) const;
  void reset() { running_ = 0.0; }

 private:
  void accumulate(std::size_t step, std::span<const double> x);

  const Potential& V_;
  const Potential& Vtilde_;
  NoiseScale noise_;
  TimeGrid grid_;
  RiemannMesh mesh_;
  double inv_sigma2_;
  double running_ = 0.0;
};

}  // namespace lrare
