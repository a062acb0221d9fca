#include "lrare/sde.hpp"

#include <cmath>
#include <cstdio>

namespace lrare {

TimeGrid TimeGrid::make(double horizon, double step) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw ConfigError("time step h must be finite and > 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ConfigError("horizon T must be finite and > 0");
  TimeGrid grid;
  grid.step = step;
  const double ratio = horizon / step;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
    grid.steps = static_cast<std::size_t>(nearest);
    grid.horizon = horizon;
  } else {
    grid.steps = static_cast<std::size_t>(std::ceil(ratio));
    grid.horizon = static_cast<double>(grid.steps) * step;
    grid.rounded = true;
    std::fprintf(stderr,
                 "lrare: warning: T/h = %.12g is not an integer; horizon "
                 "rounded up to %.12g\n",
                 ratio, grid.horizon);
  }
  return grid;
}

std::vector<double> SamplePath::times() const {
  std::vector<double> t(size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = grid.time(i);
  return t;
}

namespace {

SamplePath simulate_impl(const Potential& V, const DriftField* F,
                         const NoiseScale& noise, std::span<const double> x0,
                         const TimeGrid& grid, NormalStream& normals) {
  if (x0.size() != V.dimension())
    throw PreconditionError("simulate: x0 has dimension " +
                            std::to_string(x0.size()) + ", potential has " +
                            std::to_string(V.dimension()));
  const std::size_t d = x0.size();
  SamplePath path;
  path.dimension = d;
  path.grid = grid;
  path.noise = noise;
  path.states.reserve((grid.steps + 1) * d);
  path.increments.reserve(grid.steps * d);
  path.states.insert(path.states.end(), x0.begin(), x0.end());
  std::vector<double> state(x0.begin(), x0.end());
  integrate(V, F, noise, grid, normals, state,
            [&](std::size_t i, std::span<const double> x,
                std::span<const double> xi) {
              if (i > 0) path.states.insert(path.states.end(), x.begin(), x.end());
              path.increments.insert(path.increments.end(), xi.begin(),
                                     xi.end());
            });
  path.states.insert(path.states.end(), state.begin(), state.end());
  return path;
}

}  // namespace

SamplePath simulate(const Potential& V, const NoiseScale& noise,
                    std::span<const double> x0, const TimeGrid& grid,
                    NormalStream& normals) {
  return simulate_impl(V, nullptr, noise, x0, grid, normals);
}

SamplePath simulate_with_drift(const Potential& V, const DriftField& F,
                               const NoiseScale& noise,
                               std::span<const double> x0,
                               const TimeGrid& grid, NormalStream& normals) {
  if (F.dimension() != V.dimension())
    throw PreconditionError("simulate_with_drift: drift dimension mismatch");
  return simulate_impl(V, &F, noise, x0, grid, normals);
}

}  // namespace lrare
