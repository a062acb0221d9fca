#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "lrare/noise.hpp"
#include "lrare/region.hpp"

namespace lrare {

enum class Smoothness { analytic_derivatives, finite_difference_derivatives };

// Scalar energy V : R^d -> R with gradient, Laplacian and Hessian-vector
// evaluators. Derivatives default to central finite differences with step
// 1e-4 * max(1, |x_k|); concrete potentials override them with exact
// expressions. Evaluation is const and thread-safe.
class Potential {
 public:
  explicit Potential(std::size_t dim);
  virtual ~Potential() = default;

  std::size_t dimension() const { return dim_; }

  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> out) const;
  virtual double laplacian(std::span<const double> x) const;
  virtual void hessian_vector(std::span<const double> x,
                              std::span<const double> v,
                              std::span<double> out) const;
  virtual Smoothness smoothness() const {
    return Smoothness::finite_difference_derivatives;
  }
  virtual std::string describe() const = 0;

  Point gradient_at(std::span<const double> x) const;
  double gradient_norm_squared(std::span<const double> x) const;

 private:
  std::size_t dim_;
};

using PotentialPtr = std::shared_ptr<const Potential>;

class ZeroPotential final : public Potential {
 public:
  explicit ZeroPotential(std::size_t dim = 1) : Potential(dim) {}
  double value(std::span<const double>) const override { return 0.0; }
  void gradient(std::span<const double>, std::span<double> out) const override;
  double laplacian(std::span<const double>) const override { return 0.0; }
  void hessian_vector(std::span<const double>, std::span<const double>,
                      std::span<double> out) const override;
  Smoothness smoothness() const override {
    return Smoothness::analytic_derivatives;
  }
  std::string describe() const override { return "zero"; }
};

// V(x) = a . x
class LinearPotential final : public Potential {
 public:
  explicit LinearPotential(Point coefficients);
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double laplacian(std::span<const double>) const override { return 0.0; }
  void hessian_vector(std::span<const double>, std::span<const double>,
                      std::span<double> out) const override;
  Smoothness smoothness() const override {
    return Smoothness::analytic_derivatives;
  }
  std::string describe() const override;

 private:
  Point a_;
};

// V(x) = k |x|^2 / 2, so the dynamics are an Ornstein-Uhlenbeck process.
class QuadraticPotential final : public Potential {
 public:
  QuadraticPotential(double k, std::size_t dim = 1);
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double laplacian(std::span<const double>) const override;
  void hessian_vector(std::span<const double>, std::span<const double> v,
                      std::span<double> out) const override;
  Smoothness smoothness() const override {
    return Smoothness::analytic_derivatives;
  }
  std::string describe() const override;
  double stiffness() const { return k_; }

 private:
  double k_;
};

// V(x) = sum_k (-cos x_k - 1). In 1D this is the well -cos x - 1 with
// minimum -2 at 0 and flat maxima V = V' = 0 at +-pi.
class CosineWell final : public Potential {
 public:
  explicit CosineWell(std::size_t dim = 1) : Potential(dim) {}
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double laplacian(std::span<const double> x) const override;
  void hessian_vector(std::span<const double> x, std::span<const double> v,
                      std::span<double> out) const override;
  Smoothness smoothness() const override {
    return Smoothness::analytic_derivatives;
  }
  std::string describe() const override { return "cosine_well"; }
};

// User-supplied energy with finite-difference derivatives.
class FunctionPotential final : public Potential {
 public:
  using Fn = std::function<double(std::span<const double>)>;
  FunctionPotential(std::size_t dim, Fn fn, std::string name);
  double value(std::span<const double> x) const override { return fn_(x); }
  std::string describe() const override { return name_; }

 private:
  Fn fn_;
  std::string name_;
};

// Adds a constant to another potential.
class ShiftedPotential final : public Potential {
 public:
  ShiftedPotential(PotentialPtr base, double shift);
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double laplacian(std::span<const double> x) const override;
  void hessian_vector(std::span<const double> x, std::span<const double> v,
                      std::span<double> out) const override;
  Smoothness smoothness() const override { return base_->smoothness(); }
  std::string describe() const override;

 private:
  PotentialPtr base_;
  double shift_;
};

enum class RegionTransform { flatten, invert };

// V with its values replaced inside D: 0 (flatten) or -V (invert). Outside
// D (including on the boundary) it is V itself. Derivatives are taken from
// the branch selected by membership, so second derivatives are one-sided
// at the boundary where the composite is only C^1.
class TransformedPotential final : public Potential {
 public:
  TransformedPotential(PotentialPtr base, RegionPtr region,
                       RegionTransform kind);
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double laplacian(std::span<const double> x) const override;
  void hessian_vector(std::span<const double> x, std::span<const double> v,
                      std::span<double> out) const override;
  Smoothness smoothness() const override { return base_->smoothness(); }
  std::string describe() const override;

  const Potential& base() const { return *base_; }
  const Region& region() const { return *region_; }
  RegionTransform kind() const { return kind_; }

 private:
  PotentialPtr base_;
  RegionPtr region_;
  RegionTransform kind_;
};

// Tolerance for |V| and |grad V| on the boundary of D when building a
// transformed potential.
inline constexpr double kBoundaryMatchTolerance = 1e-8;

// Throw ConstructionError unless V and grad V vanish on the boundary probe
// of D, which is what makes the composite C^1.
PotentialPtr flatten_on_region(PotentialPtr V, RegionPtr D,
                               double tolerance = kBoundaryMatchTolerance);
PotentialPtr invert_on_region(PotentialPtr V, RegionPtr D,
                              double tolerance = kBoundaryMatchTolerance);

// Built-in potentials by name: "zero", "linear a=<f>", "quadratic k=<f>",
// "cosine_well".
PotentialPtr make_potential(std::string_view spec, std::size_t dim = 1);

// Vector field F : R^d -> R^d used as a reference drift.
class DriftField {
 public:
  using Fn = std::function<void(std::span<const double>, std::span<double>)>;

  DriftField(std::size_t dim, Fn fn, std::string name);
  static DriftField zero(std::size_t dim);
  static DriftField constant(Point b);

  std::size_t dimension() const { return dim_; }
  void operator()(std::span<const double> x, std::span<double> out) const {
    fn_(x, out);
  }
  Point at(std::span<const double> x) const;
  bool is_zero() const { return zero_; }
  const std::string& name() const { return name_; }

 private:
  std::size_t dim_;
  Fn fn_;
  std::string name_;
  bool zero_ = false;
};

// (L_V + L_0) V (x) = sigma^2 Lap V(x) - |grad V(x)|^2.
double generator_apply_to_self(const Potential& V, const NoiseScale& noise,
                               std::span<const double> x);

// (L_V - L_0 + 2 L^ref) V (x) = -|grad V|^2 + 2 F . grad V + sigma^2 Lap V.
double generator_apply_general(const Potential& V, const DriftField& F,
                               const NoiseScale& noise,
                               std::span<const double> x);

std::string format_point(std::span<const double> x);

}  // namespace lrare
