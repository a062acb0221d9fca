#include "lrare/potential.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "lrare/error.hpp"

namespace lrare {
namespace {

double fd_step(double xk) { return 1e-4 * std::max(1.0, std::abs(xk)); }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void check_dim(const Potential& V, std::span<const double> x) {
  if (x.size() != V.dimension())
    throw PreconditionError("potential '" + V.describe() + "' has dimension " +
                            std::to_string(V.dimension()) +
                            ", evaluated at a point of dimension " +
                            std::to_string(x.size()));
}

}  // namespace

std::string format_point(std::span<const double> x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    out += format_double(x[i]);
  }
  return out + ")";
}

Potential::Potential(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ConfigError("potential dimension must be positive");
}

void Potential::gradient(std::span<const double> x,
                         std::span<double> out) const {
  Point y(x.begin(), x.end());
  for (std::size_t k = 0; k < dim_; ++k) {
    const double step = fd_step(x[k]);
    y[k] = x[k] + step;
    const double fp = value(y);
    y[k] = x[k] - step;
    const double fm = value(y);
    y[k] = x[k];
    out[k] = (fp - fm) / (2.0 * step);
  }
}

double Potential::laplacian(std::span<const double> x) const {
  Point y(x.begin(), x.end());
  const double f0 = value(x);
  double sum = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    const double step = fd_step(x[k]);
    y[k] = x[k] + step;
    const double fp = value(y);
    y[k] = x[k] - step;
    const double fm = value(y);
    y[k] = x[k];
    sum += (fp - 2.0 * f0 + fm) / (step * step);
  }
  return sum;
}

void Potential::hessian_vector(std::span<const double> x,
                               std::span<const double> v,
                               std::span<double> out) const {
  double vnorm = 0.0;
  for (double vk : v) vnorm = std::max(vnorm, std::abs(vk));
  if (vnorm == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  double xnorm = 0.0;
  for (double xk : x) xnorm = std::max(xnorm, std::abs(xk));
  const double step = 1e-4 * std::max(1.0, xnorm) / vnorm;
  Point y(x.begin(), x.end());
  Point gp(dim_), gm(dim_);
  for (std::size_t k = 0; k < dim_; ++k) y[k] = x[k] + step * v[k];
  gradient(y, gp);
  for (std::size_t k = 0; k < dim_; ++k) y[k] = x[k] - step * v[k];
  gradient(y, gm);
  for (std::size_t k = 0; k < dim_; ++k)
    out[k] = (gp[k] - gm[k]) / (2.0 * step);
}

Point Potential::gradient_at(std::span<const double> x) const {
  Point g(dim_);
  gradient(x, g);
  return g;
}

double Potential::gradient_norm_squared(std::span<const double> x) const {
  if (dim_ == 1) {
    double g = 0.0;
    gradient(x, std::span<double>(&g, 1));
    return g * g;
  }
  const Point g = gradient_at(x);
  double s = 0.0;
  for (double gk : g) s += gk * gk;
  return s;
}

// ---------------------------------------------------------------------------

void ZeroPotential::gradient(std::span<const double>,
                             std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

void ZeroPotential::hessian_vector(std::span<const double>,
                                   std::span<const double>,
                                   std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

LinearPotential::LinearPotential(Point coefficients)
    : Potential(coefficients.size()), a_(std::move(coefficients)) {}

double LinearPotential::value(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < a_.size(); ++k) s += a_[k] * x[k];
  return s;
}

void LinearPotential::gradient(std::span<const double>,
                               std::span<double> out) const {
  std::copy(a_.begin(), a_.end(), out.begin());
}

void LinearPotential::hessian_vector(std::span<const double>,
                                     std::span<const double>,
                                     std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

std::string LinearPotential::describe() const {
  return "linear a=" + format_double(a_.front());
}

QuadraticPotential::QuadraticPotential(double k, std::size_t dim)
    : Potential(dim), k_(k) {
  if (!std::isfinite(k)) throw ConfigError("quadratic potential: k not finite");
}

double QuadraticPotential::value(std::span<const double> x) const {
  double s = 0.0;
  for (double xk : x) s += xk * xk;
  return 0.5 * k_ * s;
}

void QuadraticPotential::gradient(std::span<const double> x,
                                  std::span<double> out) const {
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = k_ * x[k];
}

double QuadraticPotential::laplacian(std::span<const double>) const {
  return k_ * static_cast<double>(dimension());
}

void QuadraticPotential::hessian_vector(std::span<const double>,
                                        std::span<const double> v,
                                        std::span<double> out) const {
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = k_ * v[k];
}

std::string QuadraticPotential::describe() const {
  return "quadratic k=" + format_double(k_);
}

double CosineWell::value(std::span<const double> x) const {
  double s = 0.0;
  for (double xk : x) s += -std::cos(xk) - 1.0;
  return s;
}

void CosineWell::gradient(std::span<const double> x,
                          std::span<double> out) const {
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::sin(x[k]);
}

double CosineWell::laplacian(std::span<const double> x) const {
  double s = 0.0;
  for (double xk : x) s += std::cos(xk);
  return s;
}

void CosineWell::hessian_vector(std::span<const double> x,
                                std::span<const double> v,
                                std::span<double> out) const {
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::cos(x[k]) * v[k];
}

FunctionPotential::FunctionPotential(std::size_t dim, Fn fn, std::string name)
    : Potential(dim), fn_(std::move(fn)), name_(std::move(name)) {}

ShiftedPotential::ShiftedPotential(PotentialPtr base, double shift)
    : Potential(base->dimension()), base_(std::move(base)), shift_(shift) {}

double ShiftedPotential::value(std::span<const double> x) const {
  return base_->value(x) + shift_;
}
void ShiftedPotential::gradient(std::span<const double> x,
                                std::span<double> out) const {
  base_->gradient(x, out);
}
double ShiftedPotential::laplacian(std::span<const double> x) const {
  return base_->laplacian(x);
}
void ShiftedPotential::hessian_vector(std::span<const double> x,
                                      std::span<const double> v,
                                      std::span<double> out) const {
  base_->hessian_vector(x, v, out);
}
std::string ShiftedPotential::describe() const {
  return base_->describe() + " + " + format_double(shift_);
}

// ---------------------------------------------------------------------------

TransformedPotential::TransformedPotential(PotentialPtr base,
                                           RegionPtr region,
                                           RegionTransform kind)
    : Potential(base->dimension()),
      base_(std::move(base)),
      region_(std::move(region)),
      kind_(kind) {
  if (region_->dimension() != dimension())
    throw ConfigError("region and potential dimensions differ");
}

double TransformedPotential::value(std::span<const double> x) const {
  if (!region_->contains(x)) return base_->value(x);
  return kind_ == RegionTransform::flatten ? 0.0 : -base_->value(x);
}

void TransformedPotential::gradient(std::span<const double> x,
                                    std::span<double> out) const {
  if (!region_->contains(x)) {
    base_->gradient(x, out);
  } else if (kind_ == RegionTransform::flatten) {
    std::fill(out.begin(), out.end(), 0.0);
  } else {
    base_->gradient(x, out);
    for (double& g : out) g = -g;
  }
}

double TransformedPotential::laplacian(std::span<const double> x) const {
  if (!region_->contains(x)) return base_->laplacian(x);
  return kind_ == RegionTransform::flatten ? 0.0 : -base_->laplacian(x);
}

void TransformedPotential::hessian_vector(std::span<const double> x,
                                          std::span<const double> v,
                                          std::span<double> out) const {
  if (!region_->contains(x)) {
    base_->hessian_vector(x, v, out);
  } else if (kind_ == RegionTransform::flatten) {
    std::fill(out.begin(), out.end(), 0.0);
  } else {
    base_->hessian_vector(x, v, out);
    for (double& h : out) h = -h;
  }
}

std::string TransformedPotential::describe() const {
  const char* name = kind_ == RegionTransform::flatten ? "flatten" : "invert";
  return std::string(name) + "(" + region_->describe() + ")";
}

namespace {

PotentialPtr transform_on_region(PotentialPtr V, RegionPtr D, double tol,
                                 RegionTransform kind) {
  if (!V || !D) throw ConfigError("transform: null potential or region");
  if (D->dimension() != V->dimension())
    throw ConfigError("transform: region dimension " +
                      std::to_string(D->dimension()) +
                      " does not match potential dimension " +
                      std::to_string(V->dimension()));
  for (const Point& p : D->boundary_probe(64)) {
    const double v = V->value(p);
    const Point g = V->gradient_at(p);
    double gnorm = 0.0;
    for (double gk : g) gnorm = std::max(gnorm, std::abs(gk));
    if (!(std::abs(v) <= tol) || !(gnorm <= tol)) {
      std::ostringstream msg;
      msg << (kind == RegionTransform::flatten ? "flatten" : "invert")
          << "_on_region: V and grad V must vanish on the boundary of "
          << D->describe() << " (tolerance " << tol << "); at "
          << format_point(p) << " |V| = " << std::abs(v)
          << ", max|grad V| = " << gnorm;
      throw ConstructionError(msg.str());
    }
  }
  return std::make_shared<const TransformedPotential>(std::move(V),
                                                      std::move(D), kind);
}

}  // namespace

PotentialPtr flatten_on_region(PotentialPtr V, RegionPtr D, double tol) {
  return transform_on_region(std::move(V), std::move(D), tol,
                             RegionTransform::flatten);
}

PotentialPtr invert_on_region(PotentialPtr V, RegionPtr D, double tol) {
  return transform_on_region(std::move(V), std::move(D), tol,
                             RegionTransform::invert);
}

PotentialPtr make_potential(std::string_view spec, std::size_t dim) {
  std::string s(spec);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.pop_back();
  std::size_t first = 0;
  while (first < s.size() && std::isspace(static_cast<unsigned char>(s[first])))
    ++first;
  s = s.substr(first);

  auto parameter = [&](const std::string& name) {
    const auto key = name + "=";
    const auto pos = s.find(key);
    if (pos == std::string::npos)
      throw ConfigError("potential '" + s + "' needs parameter " + name);
    return parse_number(std::string_view(s).substr(pos + key.size()));
  };

  if (s == "zero") return std::make_shared<const ZeroPotential>(dim);
  if (s == "cosine_well") return std::make_shared<const CosineWell>(dim);
  if (s.rfind("linear", 0) == 0)
    return std::make_shared<const LinearPotential>(Point(dim, parameter("a")));
  if (s.rfind("quadratic", 0) == 0)
    return std::make_shared<const QuadraticPotential>(parameter("k"), dim);
  throw ConfigError("unknown potential '" + s +
                    "' (expected zero | linear a=<f> | quadratic k=<f> | "
                    "cosine_well)");
}

// ---------------------------------------------------------------------------

DriftField::DriftField(std::size_t dim, Fn fn, std::string name)
    : dim_(dim), fn_(std::move(fn)), name_(std::move(name)) {}

DriftField DriftField::zero(std::size_t dim) {
  DriftField f(
      dim,
      [](std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
      },
      "zero");
  f.zero_ = true;
  return f;
}

DriftField DriftField::constant(Point b) {
  const std::size_t dim = b.size();
  return DriftField(
      dim,
      [b = std::move(b)](std::span<const double>, std::span<double> out) {
        std::copy(b.begin(), b.end(), out.begin());
      },
      "constant");
}

Point DriftField::at(std::span<const double> x) const {
  Point out(dim_);
  fn_(x, out);
  return out;
}

// ---------------------------------------------------------------------------

double generator_apply_to_self(const Potential& V, const NoiseScale& noise,
                               std::span<const double> x) {
  check_dim(V, x);
  const double grad2 = V.gradient_norm_squared(x);
  const double lap = V.laplacian(x);
  const double out = noise.sigma_squared() * lap - grad2;
  if (!std::isfinite(out))
    throw EvaluationError("non-finite (L_V + L_0)V at x = " + format_point(x) +
                          " for potential '" + V.describe() + "'");
  return out;
}

double generator_apply_general(const Potential& V, const DriftField& F,
                               const NoiseScale& noise,
                               std::span<const double> x) {
  check_dim(V, x);
  if (F.dimension() != V.dimension())
    throw PreconditionError("drift and potential dimensions differ");
  const Point g = V.gradient_at(x);
  const Point f = F.at(x);
  double grad2 = 0.0;
  double cross = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    grad2 += g[k] * g[k];
    cross += f[k] * g[k];
  }
  const double out =
      -grad2 + 2.0 * cross + noise.sigma_squared() * V.laplacian(x);
  if (!std::isfinite(out))
    throw EvaluationError("non-finite (L_V - L_0 + 2L^ref)V at x = " +
                          format_point(x) + " for potential '" +
                          V.describe() + "'");
  return out;
}

}  // namespace lrare
