#include "lrare/fp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "lrare/detail/tridiagonal.hpp"
#include "lrare/error.hpp"

namespace lrare {

FpGrid FpGrid::make(double x_min, double x_max, std::size_t n_cells, double dt,
                    FpBoundary boundary) {
  if (!(x_max > x_min)) throw ConfigError("fp grid: need x_max > x_min");
  if (n_cells < 3) throw ConfigError("fp grid: need at least 3 cells");
  if (!(dt > 0.0)) throw ConfigError("fp grid: need dt > 0");
  FpGrid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n_cells = n_cells;
  g.dx = (x_max - x_min) / static_cast<double>(n_cells);
  g.dt = dt;
  g.boundary = boundary;
  g.density.assign(n_cells, 0.0);
  return g;
}

double FpGrid::mass() const {
  double s = 0.0;
  for (double p : density) s += p;
  return s * dx;
}

double FpGrid::mass_in(double a, double b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_cells; ++i) {
    const double lo = x_min + static_cast<double>(i) * dx;
    const double hi = lo + dx;
    const double overlap = std::min(hi, b) - std::max(lo, a);
    if (overlap > 0.0) s += density[i] * overlap;
  }
  return s;
}

void set_point_mass(FpGrid& grid, double x0) {
  if (!(x0 > grid.x_min && x0 < grid.x_max))
    throw ConfigError("fp: initial point outside the grid domain");
  double total = 0.0;
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    const double z = (grid.center(i) - x0) / grid.dx;
    grid.density[i] = std::exp(-0.5 * z * z);
    total += grid.density[i];
  }
  for (double& p : grid.density) p /= total * grid.dx;
}

namespace {

// Tridiagonal generator A of the semi-discrete system dp/dt = A p.
struct Operator {
  std::vector<double> sub, diag, super;
};

Operator assemble(const Potential& V, const NoiseScale& noise,
                  const FpGrid& g) {
  if (V.dimension() != 1)
    throw PreconditionError("fp oracle handles one-dimensional potentials only");
  const std::size_t n = g.n_cells;
  const double D = 0.5 * noise.sigma_squared();
  const double dx = g.dx;
  // Drift derivative V' at the n + 1 faces.
  std::vector<double> vp(n + 1);
  for (std::size_t f = 0; f <= n; ++f) {
    const double y = g.x_min + static_cast<double>(f) * dx;
    V.gradient(std::span<const double>(&y, 1), std::span<double>(&vp[f], 1));
    if (!std::isfinite(vp[f]))
      throw EvaluationError("fp: non-finite V' at y = " + std::to_string(y));
  }
  Operator A;
  A.sub.assign(n, 0.0);
  A.diag.assign(n, 0.0);
  A.super.assign(n, 0.0);
  // Flux through face f (between cells f-1 and f):
  //   J_f = (V'_f / 2 - D/dx) p_{f-1} + (V'_f / 2 + D/dx) p_f
  // and dp_i/dt = (J_{i+1} - J_i) / dx.
  for (std::size_t i = 0; i < n; ++i) {
    const double right = vp[i + 1];
    const double left = vp[i];
    if (i + 1 < n) {
      A.diag[i] += (0.5 * right - D / dx) / dx;
      A.super[i] += (0.5 * right + D / dx) / dx;
    } else if (g.boundary == FpBoundary::absorbing) {
      // Ghost cell -p_{n-1}: J_n = -2 D p_{n-1} / dx.
      A.diag[i] += (-2.0 * D / dx) / dx;
    }
    if (i > 0) {
      A.sub[i] -= (0.5 * left - D / dx) / dx;
      A.diag[i] -= (0.5 * left + D / dx) / dx;
    } else if (g.boundary == FpBoundary::absorbing) {
      // Ghost cell -p_0: J_0 = 2 D p_0 / dx.
      A.diag[i] -= (2.0 * D / dx) / dx;
    }
  }
  return A;
}

// Solves (I - theta dt A) p_new = (I + (1 - theta) dt A) p.
void theta_step(const Operator& A, double dt, double theta,
                std::vector<double>& p, std::vector<double>& rhs,
                std::vector<double>& sub, std::vector<double>& diag,
                std::vector<double>& super, std::vector<double>& scratch) {
  const std::size_t n = p.size();
  const double explicit_w = (1.0 - theta) * dt;
  const double implicit_w = theta * dt;
  for (std::size_t i = 0; i < n; ++i) {
    double ap = A.diag[i] * p[i];
    if (i > 0) ap += A.sub[i] * p[i - 1];
    if (i + 1 < n) ap += A.super[i] * p[i + 1];
    rhs[i] = p[i] + explicit_w * ap;
    sub[i] = -implicit_w * A.sub[i];
    diag[i] = 1.0 - implicit_w * A.diag[i];
    super[i] = -implicit_w * A.super[i];
  }
  detail::solve_tridiagonal(sub, diag, super, rhs, scratch);
  p.swap(rhs);
}

void sanitize(FpGrid& g) {
  double negative = 0.0;
  double peak = 0.0;
  for (double& p : g.density) {
    if (!std::isfinite(p))
      throw SolverError("fp: non-finite density; reduce dt or refine the grid");
    peak = std::max(peak, p);
    if (p < 0.0) {
      negative += -p * g.dx;
      p = 0.0;
    }
  }
  if (negative > 1e-6)
    throw SolverError("fp: negative mass " + std::to_string(negative) +
                      " exceeds 1e-6; reduce dt or refine the grid");
  g.clamped_mass += negative;
}

}  // namespace

FpGrid evolve(const Potential& V, const NoiseScale& noise, FpGrid grid,
              double T) {
  if (!(T > 0.0)) throw ConfigError("fp: evolution time T must be > 0");
  if (grid.density.size() != grid.n_cells)
    throw PreconditionError("fp: density size does not match the grid");
  const double resolve = noise.sigma() * std::sqrt(grid.dt) / 4.0;
  if (grid.dx > resolve && noise.sigma() > 0.0)
    std::fprintf(stderr,
                 "lrare: warning: fp grid dx = %g exceeds sigma sqrt(dt) / 4 "
                 "= %g\n",
                 grid.dx, resolve);
  const auto steps =
      static_cast<std::size_t>(std::ceil(T / grid.dt - 1e-9));
  const double dt = T / static_cast<double>(steps);
  grid.dt = dt;
  const Operator A = assemble(V, noise, grid);
  const std::size_t n = grid.n_cells;
  std::vector<double> rhs(n), sub(n), diag(n), super(n), scratch;
  for (std::size_t s = 0; s < steps; ++s) {
    if (s == 0) {
      theta_step(A, 0.5 * dt, 1.0, grid.density, rhs, sub, diag, super, scratch);
      theta_step(A, 0.5 * dt, 1.0, grid.density, rhs, sub, diag, super, scratch);
    } else {
      theta_step(A, dt, 0.5, grid.density, rhs, sub, diag, super, scratch);
    }
    sanitize(grid);
  }
  return grid;
}

FpGrid escape_grid(double a, double b, const NoiseScale& noise, double T,
                   const FpSettings& settings) {
  if (!(b > a)) throw ConfigError("fp: escape interval needs a < b");
  if (!(settings.dx > 0.0)) throw ConfigError("fp: dx must be > 0");
  const double margin = settings.margin > 0.0
                            ? settings.margin
                            : 8.0 * noise.sigma() * std::sqrt(T);
  const auto inside = static_cast<std::size_t>(std::ceil((b - a) / settings.dx));
  const double dx = (b - a) / static_cast<double>(inside);
  const auto pad = static_cast<std::size_t>(std::ceil(margin / dx));
  const double lo = a - static_cast<double>(pad) * dx;
  const double hi = b + static_cast<double>(pad) * dx;
  return FpGrid::make(lo, hi, inside + 2 * pad, settings.dt,
                      FpBoundary::reflecting);
}

double escape_probability(const Potential& V, const NoiseScale& noise,
                          double x0, double a, double b, double T,
                          FpGrid grid) {
  const double need = 6.0 * noise.sigma() * std::sqrt(T);
  if (grid.x_min > a - need || grid.x_max < b + need)
    throw ConfigError("fp: grid domain must contain D inflated by 6 sigma sqrt(T)");
  set_point_mass(grid, x0);
  const FpGrid out = evolve(V, noise, std::move(grid), T);
  const double total = out.mass();
  const double outside = out.mass_in(out.x_min, a) + out.mass_in(b, out.x_max);
  return std::clamp(outside / total, 0.0, 1.0);
}

double escape_probability(const Potential& V, const NoiseScale& noise,
                          double x0, double a, double b, double T,
                          const FpSettings& settings) {
  return escape_probability(V, noise, x0, a, b, T,
                            escape_grid(a, b, noise, T, settings));
}

void write_density_csv(std::ostream& out, const FpGrid& grid) {
  out << "y,density\n";
  char buf[96];
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", grid.center(i),
                  grid.density[i]);
    out << buf;
  }
}

}  // namespace lrare
