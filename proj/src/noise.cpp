#include "lrare/noise.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lrare/error.hpp"

namespace lrare {
namespace {

double checked_sigma(double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0)
    throw DomainError("noise: sigma must be finite and >= 0, got " +
                      std::to_string(sigma));
  return sigma;
}

double sigma_from_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("noise: beta must be finite and > 0, got " +
                      std::to_string(beta));
  return std::sqrt(2.0 / beta);
}

double sigma_from_epsilon(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0)
    throw DomainError("noise: epsilon must be finite and >= 0, got " +
                      std::to_string(epsilon));
  return std::sqrt(epsilon);
}

}  // namespace

NoiseScale NoiseScale::from_sigma(double sigma) {
  return NoiseScale(checked_sigma(sigma));
}

NoiseScale NoiseScale::from_beta(double beta) {
  return NoiseScale(sigma_from_beta(beta));
}

NoiseScale NoiseScale::from_epsilon(double epsilon) {
  return NoiseScale(sigma_from_epsilon(epsilon));
}

double NoiseScale::beta() const {
  if (sigma_ == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 / sigma_squared();
}

void NoiseScale::set_sigma(double sigma) { sigma_ = checked_sigma(sigma); }
void NoiseScale::set_beta(double beta) { sigma_ = sigma_from_beta(beta); }
void NoiseScale::set_epsilon(double epsilon) {
  sigma_ = sigma_from_epsilon(epsilon);
}

}  // namespace lrare
