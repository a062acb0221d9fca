#pragma once

namespace lrare {

// Diffusion strength of the overdamped Langevin equation. Only sigma is
// stored; beta = 2 / sigma^2 and epsilon = sigma^2 are derived, so the
// three views can never disagree.
class NoiseScale {
 public:
  static NoiseScale from_sigma(double sigma);
  static NoiseScale from_beta(double beta);
  static NoiseScale from_epsilon(double epsilon);

  double sigma() const { return sigma_; }
  double sigma_squared() const { return sigma_ * sigma_; }
  // Infinite when sigma == 0.
  double beta() const;
  double epsilon() const { return sigma_squared(); }

  void set_sigma(double sigma);
  void set_beta(double beta);
  void set_epsilon(double epsilon);

  // sigma == 0 is accepted for deterministic test runs; the Girsanov
  // weights are undefined there and reject it.
  bool degenerate() const { return sigma_ == 0.0; }

 private:
  explicit NoiseScale(double sigma) : sigma_(sigma) {}
  double sigma_;
};

}  // namespace lrare
