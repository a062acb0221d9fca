#include "lrare/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lrare/error.hpp"

namespace lrare {
namespace {

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw DomainError("transition density needs t > 0, got " +
                      std::to_string(t));
}

void check_points(const Potential& V, std::span<const double> x,
                  std::span<const double> y) {
  if (x.size() != V.dimension() || y.size() != V.dimension())
    throw PreconditionError("density: point and potential dimensions differ");
}

template <class G>
double segment_integral(std::span<const double> x, std::span<const double> y,
                        std::size_t nodes, G&& integrand) {
  Point psi(x.size());
  const double value = simpson_unit_interval(
      [&](double r) {
        for (std::size_t k = 0; k < psi.size(); ++k)
          psi[k] = (1.0 - r) * x[k] + r * y[k];
        return integrand(std::span<const double>(psi));
      },
      nodes);
  if (!std::isfinite(value))
    throw EvaluationError("segment quadrature is not finite between " +
                          format_point(x) + " and " + format_point(y));
  return value;
}

// sigma^-2 (V(x) - V(y) + t/2 * integral)
double correction_exponent(const Potential& V, const NoiseScale& noise,
                           std::span<const double> x, std::span<const double> y,
                           double t, double integral) {
  return (V.value(x) - V.value(y) + 0.5 * t * integral) / noise.sigma_squared();
}

}  // namespace

double gaussian_kernel(std::span<const double> x, double t, double sigma) {
  check_time(t);
  if (!(sigma > 0.0)) throw DomainError("gaussian kernel needs sigma > 0");
  const double var = sigma * sigma * t;
  double r2 = 0.0;
  for (double xk : x) r2 += xk * xk;
  const double d = static_cast<double>(x.size());
  return std::pow(2.0 * std::numbers::pi * var, -0.5 * d) *
         std::exp(-r2 / (2.0 * var));
}

double segment_generator_integral(const Potential& V, const NoiseScale& noise,
                                  std::span<const double> x,
                                  std::span<const double> y,
                                  std::size_t nodes) {
  check_points(V, x, y);
  return segment_integral(x, y, nodes, [&](std::span<const double> p) {
    return generator_apply_to_self(V, noise, p);
  });
}

double approximate(const Potential& V, const NoiseScale& noise,
                   std::span<const double> x, std::span<const double> y,
                   double t, std::size_t nodes) {
  check_time(t);
  const double integral = segment_generator_integral(V, noise, x, y, nodes);
  Point diff(x.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = y[k] - x[k];
  return std::exp(correction_exponent(V, noise, x, y, t, integral)) *
         gaussian_kernel(diff, t, noise.sigma());
}

GeneratorConstants estimate_generator_constants(const Potential& V,
                                                const NoiseScale& noise,
                                                const Box& box,
                                                std::size_t per_axis,
                                                double safety) {
  if (per_axis == 0) per_axis = default_grid_resolution(box.dimension(), 100'000);
  const std::size_t d = box.dimension();
  Point y(d);
  double max_grad = 0.0;
  double sup_abs = 0.0;
  for_each_grid_point(box, per_axis, [&](std::span<const double> x) {
    sup_abs = std::max(sup_abs, std::abs(generator_apply_to_self(V, noise, x)));
    // Central differences of G, whose own derivatives come from V.
    std::copy(x.begin(), x.end(), y.begin());
    double g2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double step = 1e-4 * std::max(1.0, std::abs(x[k]));
      y[k] = x[k] + step;
      const double gp = generator_apply_to_self(V, noise, y);
      y[k] = x[k] - step;
      const double gm = generator_apply_to_self(V, noise, y);
      y[k] = x[k];
      const double dk = (gp - gm) / (2.0 * step);
      g2 += dk * dk;
    }
    max_grad = std::max(max_grad, std::sqrt(g2));
  });
  return {safety * max_grad, sup_abs};
}

Box density_constants_box(std::span<const double> x, std::span<const double> y,
                          double t, const NoiseScale& noise) {
  return Box::hull(x, y).inflated(3.0 * noise.sigma() * std::sqrt(t));
}

double default_delta(double t, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw DomainError("corridor exponent alpha must lie in (0, 1/2)");
  return std::pow(t, alpha);
}

DensityBounds bounds(const Potential& V, const NoiseScale& noise,
                     std::span<const double> x, std::span<const double> y,
                     double t, double delta, double K_lipschitz,
                     std::optional<double> sup_abs_generator,
                     std::size_t nodes) {
  check_time(t);
  check_points(V, x, y);
  if (!(delta > 0.0)) throw DomainError("corridor width delta must be > 0");
  if (!(K_lipschitz >= 0.0)) throw DomainError("Lipschitz constant must be >= 0");
  const double sigma2 = noise.sigma_squared();
  const double d = static_cast<double>(x.size());
  double sup_abs = 0.0;
  if (sup_abs_generator) {
    sup_abs = *sup_abs_generator;
  } else {
    sup_abs = estimate_generator_constants(
                  V, noise, density_constants_box(x, y, t, noise))
                  .sup_abs;
  }

  DensityConstants c;
  c.delta = delta;
  c.K_lipschitz = K_lipschitz;
  c.sup_abs_generator = sup_abs;
  c.M1 = 0.5 * std::sqrt(d) * K_lipschitz;
  c.M2 = 2.0 * d *
         std::exp((V.value(x) - V.value(y) + 0.5 * t * sup_abs) / sigma2);
  c.gamma = std::exp(-2.0 * delta * delta / (sigma2 * t));

  const double integral = segment_generator_integral(V, noise, x, y, nodes);
  const double centre = correction_exponent(V, noise, x, y, t, integral);
  const double spread = c.M1 * delta * t / sigma2;
  Point diff(x.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = y[k] - x[k];
  const double rho = gaussian_kernel(diff, t, noise.sigma());

  DensityBounds out;
  out.constants = c;
  out.lower = std::max(0.0, (std::exp(centre - spread) - c.M2 * c.gamma) * rho);
  out.upper = (std::exp(centre + spread) + c.M2 * c.gamma) * rho;
  return out;
}

DensityEstimate estimate_density(const Potential& V, const NoiseScale& noise,
                                 std::span<const double> x,
                                 std::span<const double> y, double t,
                                 const DensityOptions& options) {
  check_time(t);
  check_points(V, x, y);
  DensityEstimate est;
  est.t = t;
  est.x.assign(x.begin(), x.end());
  est.y.assign(y.begin(), y.end());
  est.sigma = noise.sigma();
  est.approx = approximate(V, noise, x, y, t, options.nodes);

  double K = 0.0;
  double sup_abs = 0.0;
  if (!options.K_lipschitz || !options.sup_abs_generator) {
    const auto local = estimate_generator_constants(
        V, noise, density_constants_box(x, y, t, noise), options.grid_per_axis);
    K = local.K_lipschitz;
    sup_abs = local.sup_abs;
  }
  if (options.K_lipschitz) K = *options.K_lipschitz;
  if (options.sup_abs_generator) sup_abs = *options.sup_abs_generator;
  const double delta =
      options.delta ? *options.delta : default_delta(t, options.alpha);

  const auto b = bounds(V, noise, x, y, t, delta, K, sup_abs, options.nodes);
  est.lower = b.lower;
  est.upper = b.upper;
  est.constants = b.constants;
  return est;
}

double approximate_general(const Potential& V, const DriftField& F,
                           const NoiseScale& noise, std::span<const double> x,
                           std::span<const double> y, double t, double p_ref,
                           std::size_t nodes) {
  check_time(t);
  check_points(V, x, y);
  if (!(p_ref >= 0.0))
    throw DomainError("reference density p_ref must be >= 0");
  const double integral =
      segment_integral(x, y, nodes, [&](std::span<const double> p) {
        return generator_apply_general(V, F, noise, p);
      });
  return std::exp(correction_exponent(V, noise, x, y, t, integral)) * p_ref;
}

double corridor_violation_bound(std::size_t d, double sigma, double t,
                                double delta) {
  check_time(t);
  if (!(delta > 0.0)) throw DomainError("corridor width delta must be > 0");
  if (!(sigma > 0.0)) throw DomainError("corridor bound needs sigma > 0");
  return 2.0 * static_cast<double>(d) *
         std::exp(-2.0 * delta * delta / (sigma * sigma * t));
}

}  // namespace lrare
