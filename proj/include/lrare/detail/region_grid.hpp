#pragma once

#include <cmath>
#include <limits>

namespace lrare {

template <class Visitor>
void for_each_grid_point(const Box& box, std::size_t per_axis,
                         Visitor&& visit) {
  const std::size_t d = box.dimension();
  if (d == 0 || per_axis == 0) return;
  Point x(d);
  std::vector<std::size_t> idx(d, 0);
  auto coord = [&](std::size_t k, std::size_t i) {
    if (per_axis == 1) return 0.5 * (box.lower[k] + box.upper[k]);
    const double frac = static_cast<double>(i) /
                        static_cast<double>(per_axis - 1);
    return box.lower[k] + frac * (box.upper[k] - box.lower[k]);
  };
  while (true) {
    for (std::size_t k = 0; k < d; ++k) x[k] = coord(k, idx[k]);
    visit(std::span<const double>(x));
    std::size_t k = 0;
    while (k < d && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == d) break;
  }
}

template <class F>
double sup_over_region(const Region& region, F&& f, std::size_t per_axis) {
  double best = -std::numeric_limits<double>::infinity();
  if (region.empty()) return best;
  if (per_axis == 0) per_axis = default_grid_resolution(region.dimension());
  for_each_grid_point(region.bounding_box(), per_axis,
                      [&](std::span<const double> x) {
                        if (region.contains(x)) best = std::max(best, f(x));
                      });
  return best;
}

template <class F>
double sup_over_box(const Box& box, F&& f, std::size_t per_axis) {
  double best = -std::numeric_limits<double>::infinity();
  if (per_axis == 0) per_axis = default_grid_resolution(box.dimension());
  for_each_grid_point(box, per_axis, [&](std::span<const double> x) {
    best = std::max(best, f(x));
  });
  return best;
}

}  // namespace lrare
