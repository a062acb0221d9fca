#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lrare/potential.hpp"
#include "lrare/region.hpp"

namespace lrare {

// Piecewise-linear path phi_0 = x0, ..., phi_m on a uniform grid dt = T/m.
struct DiscretePath {
  std::size_t dimension = 1;
  double dt = 0.0;
  std::vector<double> knots;  // (m + 1) * dimension, flat

  std::size_t segments() const { return knots.size() / dimension - 1; }
  double horizon() const { return dt * static_cast<double>(segments()); }
  std::span<const double> knot(std::size_t i) const {
    return {knots.data() + i * dimension, dimension};
  }
  std::span<double> knot(std::size_t i) {
    return {knots.data() + i * dimension, dimension};
  }
  std::span<const double> terminal() const { return knot(segments()); }

  static DiscretePath constant(std::span<const double> x0, double T,
                               std::size_t m);
  static DiscretePath straight(std::span<const double> from,
                               std::span<const double> to, double T,
                               std::size_t m);
};

// Discrete Freidlin-Wentzell action
//   1/2 sum_i |(phi_{i+1} - phi_i)/dt + grad V((phi_i + phi_{i+1})/2)|^2 dt.
double action(const DiscretePath& path, const Potential& V);

// Gradient of action() with respect to every knot (the entry for phi_0 is
// filled too; callers keeping x0 fixed ignore it).
void action_gradient(const DiscretePath& path, const Potential& V,
                     std::span<double> gradient);

struct ActionOptions {
  std::size_t knots = 200;  // m
  std::size_t restarts = 1;  // initial paths per exit candidate
  std::size_t max_iterations = 10'000;
  double gradient_tolerance = 1e-6;
  std::size_t workers = 0;  // 0: default_worker_count()
};

struct ExitActionResult {
  double value = 0.0;
  DiscretePath path;
  bool converged = false;
  std::size_t iterations = 0;
};

// Minimizes the discrete action over paths from x0 whose terminal knot is
// outside D. For d = 1 (and in general for the final polish) the terminal
// knot is pinned to a boundary point; for d >= 2 the exit point is first
// located with a penalty on the terminal depth inside D. Returns the best
// result over all exit candidates and restarts.
ExitActionResult minimize_exit_action(const Potential& V,
                                      std::span<const double> x0,
                                      const Region& D, double T,
                                      const ActionOptions& options = {});

}  // namespace lrare
