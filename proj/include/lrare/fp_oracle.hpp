#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "lrare/noise.hpp"
#include "lrare/potential.hpp"

namespace lrare {

enum class FpBoundary { absorbing, reflecting };

// Cell-centred grid on [x_min, x_max] holding a probability density.
struct FpGrid {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n_cells = 0;
  double dx = 0.0;
  double dt = 0.0;
  FpBoundary boundary = FpBoundary::reflecting;
  std::vector<double> density;
  // Total mass removed by clipping small negative values.
  double clamped_mass = 0.0;

  static FpGrid make(double x_min, double x_max, std::size_t n_cells,
                     double dt, FpBoundary boundary = FpBoundary::reflecting);

  double center(std::size_t i) const {
    return x_min + (static_cast<double>(i) + 0.5) * dx;
  }
  double mass() const;
  // Mass in (a, b), splitting cells that straddle an endpoint linearly.
  double mass_in(double a, double b) const;
};

// Narrow Gaussian (standard deviation dx) centred at x0, normalized so
// that the discrete mass is exactly 1.
void set_point_mass(FpGrid& grid, double x0);

// Crank-Nicolson for dp/dt = d/dy (V'(y) p) + sigma^2/2 d^2p/dy^2 with
// centred conservative fluxes. The first step is replaced by two implicit
// Euler half-steps to damp the grid-scale modes of the initial condition.
// The time step is shrunk so that an integer number of steps reaches T.
FpGrid evolve(const Potential& V, const NoiseScale& noise, FpGrid grid,
              double T);

struct FpSettings {
  double dx = 0.005;     // target cell width
  double dt = 1e-3;
  double margin = 0.0;   // extra domain beyond D; 0 selects 8 sigma sqrt(T)
};

// P(X_T not in (a, b)) for X_0 = x0, from the density on a reflecting
// domain extending well beyond (a, b). The grid is laid out so that a and
// b fall on cell faces.
double escape_probability(const Potential& V, const NoiseScale& noise,
                          double x0, double a, double b, double T,
                          const FpSettings& settings = {});

// Same on a caller-provided grid; requires the domain to contain (a, b)
// inflated by 6 sigma sqrt(T).
double escape_probability(const Potential& V, const NoiseScale& noise,
                          double x0, double a, double b, double T,
                          FpGrid grid);

// Grid used by escape_probability(..., FpSettings).
FpGrid escape_grid(double a, double b, const NoiseScale& noise, double T,
                   const FpSettings& settings);

// "y,density" rows.
void write_density_csv(std::ostream& out, const FpGrid& grid);

}  // namespace lrare
