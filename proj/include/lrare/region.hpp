#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lrare {

using Point = std::vector<double>;

// Axis-aligned box [lower, upper]; used for bounding boxes and sampling grids.
struct Box {
  Point lower;
  Point upper;

  std::size_t dimension() const { return lower.size(); }
  Box inflated(double margin) const;
  static Box hull(std::span<const double> a, std::span<const double> b);
};

// Bounded open set D. Points on the boundary are outside.
class Region {
 public:
  virtual ~Region() = default;

  virtual std::size_t dimension() const = 0;
  virtual bool contains(std::span<const double> x) const = 0;
  virtual Box bounding_box() const = 0;
  virtual bool empty() const { return false; }

  // Closest point of the boundary to x.
  virtual Point project_to_boundary(std::span<const double> x) const = 0;

  // Boundary points that a least-action exit path from x0 is likely to
  // end at (the two endpoints of an interval, face projections of a box).
  virtual std::vector<Point> exit_candidates(
      std::span<const double> x0) const = 0;

  // Points on the boundary used to probe C^1 matching of transformed
  // potentials. For an interval these are exactly the two endpoints.
  virtual std::vector<Point> boundary_probe(std::size_t per_face) const = 0;

  // Spec string accepted by parse_region.
  virtual std::string describe() const = 0;
};

using RegionPtr = std::shared_ptr<const Region>;

// Open box. In one dimension this is the interval (a, b).
class BoxRegion final : public Region {
 public:
  BoxRegion(Point lower, Point upper);
  static std::shared_ptr<const BoxRegion> interval(double a, double b);

  std::size_t dimension() const override { return lower_.size(); }
  bool contains(std::span<const double> x) const override;
  Box bounding_box() const override { return {lower_, upper_}; }
  Point project_to_boundary(std::span<const double> x) const override;
  std::vector<Point> exit_candidates(
      std::span<const double> x0) const override;
  std::vector<Point> boundary_probe(std::size_t per_face) const override;
  std::string describe() const override;

  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }

 private:
  Point lower_;
  Point upper_;
};

// Open ball |x - center| < radius.
class BallRegion final : public Region {
 public:
  BallRegion(Point center, double radius);

  std::size_t dimension() const override { return center_.size(); }
  bool contains(std::span<const double> x) const override;
  Box bounding_box() const override;
  Point project_to_boundary(std::span<const double> x) const override;
  std::vector<Point> exit_candidates(
      std::span<const double> x0) const override;
  std::vector<Point> boundary_probe(std::size_t per_face) const override;
  std::string describe() const override;

 private:
  Point center_;
  double radius_;
};

// D = {} : every path "escapes".
class EmptyRegion final : public Region {
 public:
  explicit EmptyRegion(std::size_t dim) : dim_(dim) {}

  std::size_t dimension() const override { return dim_; }
  bool contains(std::span<const double>) const override { return false; }
  Box bounding_box() const override;
  bool empty() const override { return true; }
  Point project_to_boundary(std::span<const double> x) const override;
  std::vector<Point> exit_candidates(
      std::span<const double> x0) const override;
  std::vector<Point> boundary_probe(std::size_t) const override { return {}; }
  std::string describe() const override { return "empty"; }

 private:
  std::size_t dim_;
};

// Parses "interval:a,b", "box:l1,l2:u1,u2", "ball:c1,c2:r" or "empty".
// Numbers accept the forms described by parse_number. `dim` is only used
// for "empty".
RegionPtr parse_region(std::string_view spec, std::size_t dim = 1);

// Parses a real number; additionally accepts "pi", "-pi", "2pi", "0.5*pi".
double parse_number(std::string_view text);

// Regular grid with `per_axis` points per coordinate covering `box`
// (endpoints included), visited in lexicographic order.
template <class Visitor>
void for_each_grid_point(const Box& box, std::size_t per_axis, Visitor&& visit);

// Points per axis for a sampling grid in dimension d: 10^4 in 1D,
// otherwise min(256, floor(cap^(1/d))) so that the total stays <= cap.
std::size_t default_grid_resolution(std::size_t dim,
                                    std::size_t cap = 1'000'000);

// Supremum of f over grid points of the bounding box that lie in D.
// Returns -infinity when no grid point falls inside D.
template <class F>
double sup_over_region(const Region& region, F&& f,
                       std::size_t per_axis = 0);

// Supremum of f over all grid points of a box.
template <class F>
double sup_over_box(const Box& box, F&& f, std::size_t per_axis = 0);

}  // namespace lrare

#include "lrare/detail/region_grid.hpp"
