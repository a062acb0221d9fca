#include "lrare/region.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lrare/error.hpp"

namespace lrare {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

Point parse_vector(std::string_view s) {
  Point out;
  for (auto part : split(s, ',')) out.push_back(parse_number(part));
  return out;
}

// Shortest text that round-trips, with pi multiples written symbolically
// so that boundaries like +-pi survive an echo/parse cycle bit-exactly.
std::string format_number(double v) {
  constexpr double pi = std::numbers::pi;
  if (v == pi) return "pi";
  if (v == -pi) return "-pi";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_vector(const Point& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ',';
    out += format_number(p[i]);
  }
  return out;
}

}  // namespace

double parse_number(std::string_view text) {
  auto s = trim(text);
  if (s.empty()) throw ConfigError("expected a number, got empty text");
  double sign = 1.0;
  std::string_view body = s;
  if (body.front() == '-' || body.front() == '+') {
    if (body.front() == '-') sign = -1.0;
    body.remove_prefix(1);
  }
  if (body.size() >= 2 && body.substr(body.size() - 2) == "pi") {
    auto factor_text = body.substr(0, body.size() - 2);
    if (!factor_text.empty() && factor_text.back() == '*')
      factor_text.remove_suffix(1);
    double factor = 1.0;
    if (!factor_text.empty()) {
      const auto res = std::from_chars(
          factor_text.data(), factor_text.data() + factor_text.size(), factor);
      if (res.ec != std::errc() ||
          res.ptr != factor_text.data() + factor_text.size())
        throw ConfigError("malformed number '" + std::string(s) + "'");
    }
    return sign * factor * std::numbers::pi;
  }
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("malformed number '" + std::string(s) + "'");
  return value;
}

Box Box::inflated(double margin) const {
  Box b = *this;
  for (std::size_t k = 0; k < b.dimension(); ++k) {
    b.lower[k] -= margin;
    b.upper[k] += margin;
  }
  return b;
}

Box Box::hull(std::span<const double> a, std::span<const double> b) {
  Box box{Point(a.size()), Point(a.size())};
  for (std::size_t k = 0; k < a.size(); ++k) {
    box.lower[k] = std::min(a[k], b[k]);
    box.upper[k] = std::max(a[k], b[k]);
  }
  return box;
}

std::size_t default_grid_resolution(std::size_t dim, std::size_t cap) {
  if (dim <= 1) return 10'000;
  const auto per_axis = static_cast<std::size_t>(std::floor(
      std::pow(static_cast<double>(cap), 1.0 / static_cast<double>(dim)) +
      1e-9));
  return std::clamp<std::size_t>(per_axis, 2, 256);
}

// ---------------------------------------------------------------------------

BoxRegion::BoxRegion(Point lower, Point upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw ConfigError("box region: bounds must be non-empty and equal length");
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    if (!std::isfinite(lower_[k]) || !std::isfinite(upper_[k]) ||
        !(lower_[k] < upper_[k]))
      throw ConfigError("box region: need finite lower < upper in every "
                        "coordinate");
  }
}

std::shared_ptr<const BoxRegion> BoxRegion::interval(double a, double b) {
  return std::make_shared<const BoxRegion>(Point{a}, Point{b});
}

bool BoxRegion::contains(std::span<const double> x) const {
  for (std::size_t k = 0; k < lower_.size(); ++k)
    if (!(x[k] > lower_[k] && x[k] < upper_[k])) return false;
  return true;
}

Point BoxRegion::project_to_boundary(std::span<const double> x) const {
  Point p(x.begin(), x.end());
  if (!contains(x)) {
    // Outside: clamp into the closed box; the result lies on a face.
    for (std::size_t k = 0; k < p.size(); ++k)
      p[k] = std::clamp(p[k], lower_[k], upper_[k]);
    return p;
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  bool to_upper = false;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (x[k] - lower_[k] < best) {
      best = x[k] - lower_[k];
      best_k = k;
      to_upper = false;
    }
    if (upper_[k] - x[k] < best) {
      best = upper_[k] - x[k];
      best_k = k;
      to_upper = true;
    }
  }
  p[best_k] = to_upper ? upper_[best_k] : lower_[best_k];
  return p;
}

std::vector<Point> BoxRegion::exit_candidates(
    std::span<const double> x0) const {
  std::vector<Point> out;
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    Point lo(x0.begin(), x0.end());
    Point hi(x0.begin(), x0.end());
    for (std::size_t j = 0; j < lo.size(); ++j) {
      lo[j] = std::clamp(lo[j], lower_[j], upper_[j]);
      hi[j] = lo[j];
    }
    lo[k] = lower_[k];
    hi[k] = upper_[k];
    out.push_back(std::move(lo));
    out.push_back(std::move(hi));
  }
  return out;
}

std::vector<Point> BoxRegion::boundary_probe(std::size_t per_face) const {
  const std::size_t d = lower_.size();
  std::vector<Point> out;
  if (d == 1) return {Point{lower_[0]}, Point{upper_[0]}};
  // Sample each face on a grid over the remaining coordinates.
  const std::size_t per_axis = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::pow(static_cast<double>(per_face),
                                           1.0 / static_cast<double>(d - 1))));
  for (std::size_t k = 0; k < d; ++k) {
    Box face{lower_, upper_};
    for (double side : {lower_[k], upper_[k]}) {
      face.lower[k] = side;
      face.upper[k] = side;
      for_each_grid_point(face, per_axis, [&](std::span<const double> p) {
        out.emplace_back(p.begin(), p.end());
      });
    }
  }
  return out;
}

std::string BoxRegion::describe() const {
  if (lower_.size() == 1)
    return "interval:" + format_number(lower_[0]) + "," +
           format_number(upper_[0]);
  return "box:" + format_vector(lower_) + ":" + format_vector(upper_);
}

// ---------------------------------------------------------------------------

BallRegion::BallRegion(Point center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (center_.empty()) throw ConfigError("ball region: empty center");
  if (!(radius_ > 0.0) || !std::isfinite(radius_))
    throw ConfigError("ball region: radius must be finite and > 0");
}

bool BallRegion::contains(std::span<const double> x) const {
  double r2 = 0.0;
  for (std::size_t k = 0; k < center_.size(); ++k) {
    const double dx = x[k] - center_[k];
    r2 += dx * dx;
  }
  return r2 < radius_ * radius_;
}

Box BallRegion::bounding_box() const {
  return Box{center_, center_}.inflated(radius_);
}

Point BallRegion::project_to_boundary(std::span<const double> x) const {
  Point dir(center_.size());
  double norm = 0.0;
  for (std::size_t k = 0; k < dir.size(); ++k) {
    dir[k] = x[k] - center_[k];
    norm += dir[k] * dir[k];
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    dir.assign(dir.size(), 0.0);
    dir[0] = 1.0;
    norm = 1.0;
  }
  Point p(center_);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] += radius_ * dir[k] / norm;
  return p;
}

std::vector<Point> BallRegion::exit_candidates(
    std::span<const double> x0) const {
  std::vector<Point> out{project_to_boundary(x0)};
  Point opposite(center_);
  for (std::size_t k = 0; k < opposite.size(); ++k)
    opposite[k] = 2.0 * center_[k] - out.front()[k];
  out.push_back(std::move(opposite));
  return out;
}

std::vector<Point> BallRegion::boundary_probe(std::size_t per_face) const {
  // Deterministic quasi-uniform directions from a fixed low-discrepancy
  // sequence, projected onto the sphere.
  std::vector<Point> out;
  const std::size_t d = center_.size();
  const std::size_t n = std::max<std::size_t>(per_face, 2 * d);
  for (std::size_t i = 0; i < n; ++i) {
    Point dir(d);
    for (std::size_t k = 0; k < d; ++k) {
      const double u = std::fmod(0.5 + static_cast<double>(i + 1) *
                                            std::sqrt(2.0 + static_cast<double>(k)),
                                 1.0);
      dir[k] = 2.0 * u - 1.0;
    }
    Point p(center_);
    for (std::size_t k = 0; k < d; ++k) p[k] += dir[k];
    out.push_back(project_to_boundary(p));
  }
  return out;
}

std::string BallRegion::describe() const {
  return "ball:" + format_vector(center_) + ":" + format_number(radius_);
}

// ---------------------------------------------------------------------------

Box EmptyRegion::bounding_box() const {
  return {Point(dim_, 0.0), Point(dim_, 0.0)};
}

Point EmptyRegion::project_to_boundary(std::span<const double> x) const {
  return Point(x.begin(), x.end());
}

std::vector<Point> EmptyRegion::exit_candidates(
    std::span<const double> x0) const {
  return {Point(x0.begin(), x0.end())};
}

// ---------------------------------------------------------------------------

RegionPtr parse_region(std::string_view spec, std::size_t dim) {
  const auto s = trim(spec);
  if (s == "empty") return std::make_shared<const EmptyRegion>(dim);
  const auto parts = split(s, ':');
  const auto kind = parts.front();
  if (kind == "interval" && parts.size() == 2) {
    const auto ends = parse_vector(parts[1]);
    if (ends.size() != 2)
      throw ConfigError("interval region needs two endpoints: '" +
                        std::string(s) + "'");
    return BoxRegion::interval(ends[0], ends[1]);
  }
  if (kind == "box" && parts.size() == 3)
    return std::make_shared<const BoxRegion>(parse_vector(parts[1]),
                                             parse_vector(parts[2]));
  if (kind == "ball" && parts.size() == 3)
    return std::make_shared<const BallRegion>(parse_vector(parts[1]),
                                              parse_number(parts[2]));
  throw ConfigError("unrecognized region '" + std::string(s) +
                    "' (expected interval:a,b | box:lo:hi | ball:c:r | empty)");
}

}  // namespace lrare
