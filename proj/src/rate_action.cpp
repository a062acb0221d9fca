#include "lrare/rate_action.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrare/detail/parallel.hpp"
#include "lrare/detail/tridiagonal.hpp"
#include "lrare/error.hpp"
#include "lrare/estimators.hpp"

namespace lrare {

DiscretePath DiscretePath::constant(std::span<const double> x0, double T,
                                    std::size_t m) {
  return straight(x0, x0, T, m);
}

DiscretePath DiscretePath::straight(std::span<const double> from,
                                    std::span<const double> to, double T,
                                    std::size_t m) {
  if (m < 2) throw ConfigError("discrete path needs at least 2 segments");
  if (!(T > 0.0)) throw ConfigError("discrete path needs T > 0");
  DiscretePath p;
  p.dimension = from.size();
  p.dt = T / static_cast<double>(m);
  p.knots.resize((m + 1) * p.dimension);
  for (std::size_t i = 0; i <= m; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(m);
    for (std::size_t k = 0; k < p.dimension; ++k)
      p.knots[i * p.dimension + k] = (1.0 - r) * from[k] + r * to[k];
  }
  return p;
}

double action(const DiscretePath& path, const Potential& V) {
  const std::size_t d = path.dimension;
  const std::size_t m = path.segments();
  if (m < 2) throw PreconditionError("action needs m >= 2 segments");
  std::vector<double> mid(d), g(d);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto a = path.knot(i);
    const auto b = path.knot(i + 1);
    for (std::size_t k = 0; k < d; ++k) mid[k] = 0.5 * (a[k] + b[k]);
    V.gradient(mid, g);
    for (std::size_t k = 0; k < d; ++k) {
      const double r = (b[k] - a[k]) / path.dt + g[k];
      sum += r * r;
    }
  }
  return 0.5 * sum * path.dt;
}

void action_gradient(const DiscretePath& path, const Potential& V,
                     std::span<double> gradient) {
  const std::size_t d = path.dimension;
  const std::size_t m = path.segments();
  std::fill(gradient.begin(), gradient.end(), 0.0);
  std::vector<double> mid(d), g(d), r(d), hr(d);
  for (std::size_t i = 0; i < m; ++i) {
    const auto a = path.knot(i);
    const auto b = path.knot(i + 1);
    for (std::size_t k = 0; k < d; ++k) mid[k] = 0.5 * (a[k] + b[k]);
    V.gradient(mid, g);
    for (std::size_t k = 0; k < d; ++k) r[k] = (b[k] - a[k]) / path.dt + g[k];
    V.hessian_vector(mid, r, hr);
    // d/d phi_i and d/d phi_{i+1} of dt/2 |r_i|^2.
    for (std::size_t k = 0; k < d; ++k) {
      gradient[i * d + k] += -r[k] + 0.5 * path.dt * hr[k];
      gradient[(i + 1) * d + k] += r[k] + 0.5 * path.dt * hr[k];
    }
  }
}

namespace {

// Gradient descent in the metric of the discrete H^1 seminorm (each step
// is preconditioned by the tridiagonal Hessian of 1/2 sum |dphi|^2 / dt)
// with Armijo backtracking. Knot 0 is fixed; the terminal knot is either
// fixed or free with a quadratic penalty on its depth inside D.
class ActionDescent {
 public:
  ActionDescent(const Potential& V, const Region& D, DiscretePath path)
      : V_(V), D_(D), path_(std::move(path)) {}

  DiscretePath& path() { return path_; }
  std::size_t iterations() const { return iterations_; }

  // Returns true when the gradient norm dropped below tol.
  bool run(double penalty, std::size_t max_iterations, double tol) {
    penalty_ = penalty;
    const std::size_t d = path_.dimension;
    const std::size_t m = path_.segments();
    const std::size_t last = penalty_ > 0.0 ? m : m - 1;
    std::vector<double> grad(path_.knots.size());
    std::vector<double> dir(path_.knots.size());
    std::vector<double> sub(last), diag(last), super(last), col(last), scratch;
    DiscretePath trial = path_;
    double f = objective(path_);
    for (std::size_t it = 0; it < max_iterations; ++it) {
      objective_gradient(path_, grad);
      double gnorm2 = 0.0;
      for (std::size_t j = d; j < (last + 1) * d; ++j) gnorm2 += grad[j] * grad[j];
      if (std::sqrt(gnorm2) < tol) return true;

      std::fill(dir.begin(), dir.end(), 0.0);
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t j = 0; j < last; ++j) {
          const std::size_t knot = j + 1;
          const bool free_end = knot == m;
          sub[j] = -1.0 / path_.dt;
          super[j] = -1.0 / path_.dt;
          diag[j] = free_end ? 1.0 / path_.dt + 2.0 * penalty_ : 2.0 / path_.dt;
          col[j] = -grad[knot * d + k];
        }
        detail::solve_tridiagonal(sub, diag, super, col, scratch);
        for (std::size_t j = 0; j < last; ++j) dir[(j + 1) * d + k] = col[j];
      }
      double slope = 0.0;
      for (std::size_t j = 0; j < dir.size(); ++j) slope += grad[j] * dir[j];
      if (!(slope < 0.0)) return false;

      double step = 1.0;
      double f_trial = f;
      bool accepted = false;
      while (step > 1e-14) {
        for (std::size_t j = 0; j < dir.size(); ++j)
          trial.knots[j] = path_.knots[j] + step * dir[j];
        f_trial = objective(trial);
        if (std::isfinite(f_trial) && f_trial <= f + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      ++iterations_;
      if (!accepted) return std::sqrt(gnorm2) < tol;
      std::swap(path_.knots, trial.knots);
      f = f_trial;
    }
    return false;
  }

 private:
  double penalty_term(std::span<const double> terminal) const {
    if (penalty_ <= 0.0 || !D_.contains(terminal)) return 0.0;
    const Point proj = D_.project_to_boundary(terminal);
    double s = 0.0;
    for (std::size_t k = 0; k < proj.size(); ++k) {
      const double diff = terminal[k] - proj[k];
      s += diff * diff;
    }
    return penalty_ * s;
  }

  double objective(const DiscretePath& p) const {
    return action(p, V_) + penalty_term(p.terminal());
  }

  void objective_gradient(const DiscretePath& p, std::vector<double>& grad) const {
    action_gradient(p, V_, grad);
    const auto terminal = p.terminal();
    if (penalty_ > 0.0 && D_.contains(terminal)) {
      const Point proj = D_.project_to_boundary(terminal);
      const std::size_t base = p.segments() * p.dimension;
      for (std::size_t k = 0; k < proj.size(); ++k)
        grad[base + k] += 2.0 * penalty_ * (terminal[k] - proj[k]);
    }
  }

  const Potential& V_;
  const Region& D_;
  DiscretePath path_;
  double penalty_ = 0.0;
  std::size_t iterations_ = 0;
};

// Deterministic bump added to the straight initial path of restart r > 0.
void perturb(DiscretePath& path, std::size_t restart, double scale) {
  const std::size_t m = path.segments();
  for (std::size_t i = 1; i < m; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(m);
    for (std::size_t k = 0; k < path.dimension; ++k) {
      const double mode = static_cast<double>(restart + k);
      path.knots[i * path.dimension + k] +=
          scale * std::sin(mode * std::acos(-1.0) * r) /
          static_cast<double>(restart);
    }
  }
}

ExitActionResult descend_to(const Potential& V, std::span<const double> x0,
                            const Region& D, double T, const Point& target,
                            std::size_t restart, const ActionOptions& options) {
  DiscretePath init = DiscretePath::straight(x0, target, T, options.knots);
  if (restart > 0) {
    double span = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k)
      span = std::max(span, std::abs(target[k] - x0[k]));
    perturb(init, restart, 0.25 * std::max(span, 1e-3));
  }
  ActionDescent descent(V, D, std::move(init));
  const std::size_t dim = x0.size();
  if (dim > 1) {
    const double penalties[] = {1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
    const std::size_t per_stage = std::max<std::size_t>(
        1, options.max_iterations / (std::size(penalties) + 1));
    for (double mu : penalties)
      descent.run(mu, per_stage, options.gradient_tolerance);
    // Pin the terminal knot to the boundary before polishing.
    auto terminal = descent.path().knot(descent.path().segments());
    if (D.contains(terminal)) {
      const Point proj = D.project_to_boundary(terminal);
      std::copy(proj.begin(), proj.end(), terminal.begin());
    }
  }
  const std::size_t used = descent.iterations();
  const std::size_t remaining =
      options.max_iterations > used ? options.max_iterations - used : 1;
  ExitActionResult out;
  out.converged = descent.run(0.0, remaining, options.gradient_tolerance);
  out.iterations = descent.iterations();
  out.path = std::move(descent.path());
  out.value = action(out.path, V);
  return out;
}

}  // namespace

ExitActionResult minimize_exit_action(const Potential& V,
                                      std::span<const double> x0,
                                      const Region& D, double T,
                                      const ActionOptions& options) {
  if (x0.size() != V.dimension() || D.dimension() != V.dimension())
    throw PreconditionError("minimize_exit_action: dimension mismatch");
  if (options.knots < 2) throw ConfigError("action knots m must be >= 2");
  if (!(T > 0.0)) throw ConfigError("action horizon T must be > 0");
  if (!D.contains(x0)) {
    ExitActionResult trivial;
    trivial.path = DiscretePath::constant(x0, T, options.knots);
    trivial.value = 0.0;
    trivial.converged = true;
    return trivial;
  }

  struct Start {
    Point target;
    std::size_t restart;
  };
  std::vector<Start> starts;
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
  for (const Point& c : D.exit_candidates(x0))
    for (std::size_t r = 0; r < restarts; ++r) starts.push_back({c, r});

  const std::size_t workers =
      options.workers == 0 ? default_worker_count() : options.workers;
  auto results = detail::run_blocks<ExitActionResult>(
      starts.size(), 1, workers,
      [&](std::size_t b, std::size_t, std::size_t) {
        return descend_to(V, x0, D, T, starts[b].target, starts[b].restart,
                          options);
      });

  ExitActionResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (auto& r : results) {
    if (D.contains(r.path.terminal())) continue;
    if (r.value < best.value) best = std::move(r);
  }
  if (!std::isfinite(best.value))
    throw Error("minimize_exit_action: no restart produced an exiting path");
  return best;
}

}  // namespace lrare
