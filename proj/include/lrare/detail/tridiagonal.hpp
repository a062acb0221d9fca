#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lrare::detail {

// Thomas algorithm for a x_{i-1} + b x_i + c x_{i+1} = r. sub[0] and
// super[n-1] are ignored. Assumes diagonal dominance (no pivoting).
inline void solve_tridiagonal(std::span<const double> sub,
                              std::span<const double> diag,
                              std::span<const double> super,
                              std::span<double> rhs_solution,
                              std::vector<double>& scratch) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  scratch.resize(n);
  double beta = diag[0];
  rhs_solution[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    scratch[i] = super[i - 1] / beta;
    beta = diag[i] - sub[i] * scratch[i];
    rhs_solution[i] = (rhs_solution[i] - sub[i] * rhs_solution[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;)
    rhs_solution[i] -= scratch[i + 1] * rhs_solution[i + 1];
}

}  // namespace lrare::detail
