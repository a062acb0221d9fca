#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lrare {

// Base of every exception thrown by the library. The C API maps
// ConfigError to LRARE_CONFIG_ERROR and everything else to
// LRARE_RUNTIME_ERROR.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user configuration: bad keys, malformed values, misaligned meshes.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function (t <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A potential or derivative evaluated to a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// A transformed potential could not be built (boundary mismatch).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation precondition that is not a config problem.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Euler-Maruyama blow-up. Carries the offending step and sample index.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::size_t step,
                  std::size_t sample = 0)
      : Error(what), step_(step), sample_(sample) {}
  std::size_t step() const { return step_; }
  std::size_t sample() const { return sample_; }

 private:
  std::size_t step_;
  std::size_t sample_;
};

// Fokker-Planck solver went unstable.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace lrare
