#include "lrare/girsanov.hpp"

#include <cmath>

#include "lrare/error.hpp"

namespace lrare {
namespace {

double inverse_variance(const NoiseScale& noise) {
  if (noise.degenerate())
    throw DomainError("change of measure is undefined for sigma = 0");
  return 1.0 / noise.sigma_squared();
}

void check_finite(double v, const char* what, std::span<const double> x) {
  if (!std::isfinite(v))
    throw EvaluationError(std::string(what) + " is not finite at x = " +
                          format_point(x));
}

void check_dims(const SamplePath& path, const Potential& V,
                const Potential& Vtilde) {
  if (V.dimension() != path.dimension || Vtilde.dimension() != path.dimension)
    throw PreconditionError("log weight: path and potential dimensions differ");
}

}  // namespace

RiemannMesh RiemannMesh::make(double tau, const TimeGrid& grid) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw ConfigError("Riemann mesh tau must be finite and > 0");
  const double ratio = tau / grid.step;
  const double nearest = std::round(ratio);
  if (nearest < 1.0 || std::abs(ratio - nearest) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("Riemann mesh tau = " + std::to_string(tau) +
                      " is not a positive integer multiple of h = " +
                      std::to_string(grid.step));
  RiemannMesh mesh;
  mesh.stride = static_cast<std::size_t>(nearest);
  mesh.tau = tau;
  return mesh;
}

double RiemannMesh::width(std::size_t i, const TimeGrid& grid) const {
  const std::size_t remaining = grid.steps - i;
  return static_cast<double>(std::min(stride, remaining)) * grid.step;
}

GeneratorWeightAccumulator::GeneratorWeightAccumulator(
    const Potential& V, const Potential& Vtilde, const NoiseScale& noise,
    const TimeGrid& grid, double tau)
    : V_(V),
      Vtilde_(Vtilde),
      noise_(noise),
      grid_(grid),
      mesh_(RiemannMesh::make(tau, grid)),
      inv_sigma2_(inverse_variance(noise)) {
  if (V.dimension() != Vtilde.dimension())
    throw PreconditionError("log weight: potentials of different dimension");
}

void GeneratorWeightAccumulator::accumulate(std::size_t step,
                                            std::span<const double> x) {
  const double diff = generator_apply_to_self(V_, noise_, x) -
                      generator_apply_to_self(Vtilde_, noise_, x);
  running_ += 0.5 * inv_sigma2_ * diff * mesh_.width(step, grid_);
}

LogWeight GeneratorWeightAccumulator::finish(
    std::span<const double> x0, std::span<const double> terminal) const {
  const double boundary = inv_sigma2_ * (V_.value(x0) - V_.value(terminal) -
                                         (Vtilde_.value(x0) -
                                          Vtilde_.value(terminal)));
  check_finite(boundary, "log-weight boundary term", terminal);
  LogWeight w;
  w.boundary_term = boundary;
  w.running_integral = running_;
  w.log_value = boundary + running_;
  w.mesh = mesh_.tau;
  return w;
}

LogWeight log_weight_generator_form(const SamplePath& path, const Potential& V,
                                    const Potential& Vtilde, double tau) {
  check_dims(path, V, Vtilde);
  GeneratorWeightAccumulator acc(V, Vtilde, path.noise, path.grid, tau);
  for (std::size_t i = 0; i < path.grid.steps; ++i)
    acc.observe(i, path.state(i));
  return acc.finish(path.initial(), path.terminal());
}

LogWeight log_weight_stochastic_integral_form(const SamplePath& path,
                                              const Potential& V,
                                              const Potential& Vtilde) {
  check_dims(path, V, Vtilde);
  if (!path.has_increments())
    throw PreconditionError(
        "stochastic-integral log weight needs the path's Gaussian increments");
  const double inv_sigma2 = inverse_variance(path.noise);
  const double inv_sigma = 1.0 / path.noise.sigma();
  const double h = path.grid.step;
  const double sqrt_h = std::sqrt(h);
  const std::size_t d = path.dimension;
  std::vector<double> gV(d), gVt(d);
  double ito = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < path.grid.steps; ++i) {
    const auto x = path.state(i);
    const auto xi = path.increment(i);
    V.gradient(x, gV);
    Vtilde.gradient(x, gVt);
    for (std::size_t k = 0; k < d; ++k) {
      const double gradU = gVt[k] - gV[k];
      ito += gradU * sqrt_h * xi[k];
      quad += gradU * gradU * h;
    }
  }
  LogWeight w;
  w.running_integral = inv_sigma * ito - 0.5 * inv_sigma2 * quad;
  w.log_value = w.running_integral;
  w.mesh = h;
  check_finite(w.log_value, "stochastic-integral log weight", path.terminal());
  return w;
}

LogWeight log_weight_general_reference(const SamplePath& path,
                                       const Potential& V, const DriftField& F,
                                       double tau) {
  if (V.dimension() != path.dimension || F.dimension() != path.dimension)
    throw PreconditionError("log weight: path, potential, drift dimensions differ");
  const double inv_sigma2 = inverse_variance(path.noise);
  const RiemannMesh mesh = RiemannMesh::make(tau, path.grid);
  double running = 0.0;
  for (std::size_t i = 0; i < path.grid.steps; i += mesh.stride)
    running += 0.5 * inv_sigma2 *
               generator_apply_general(V, F, path.noise, path.state(i)) *
               mesh.width(i, path.grid);
  LogWeight w;
  w.boundary_term =
      inv_sigma2 * (V.value(path.initial()) - V.value(path.terminal()));
  w.running_integral = running;
  w.log_value = w.boundary_term + w.running_integral;
  w.mesh = mesh.tau;
  check_finite(w.log_value, "general-reference log weight", path.terminal());
  return w;
}

}  // namespace lrare
