#include "kpplab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "kpplab/error.hpp"

namespace kpplab {

Grid Grid::symmetric(int dim, double half_width, double h) {
  if (dim != 1 && dim != 2) throw InvalidArgument(fmt::format("dimension must be 1 or 2, got {}", dim));
  if (!(h > 0.0) || !(half_width > 0.0)) throw InvalidArgument("grid spacing and half-width must be positive");
  const double cells = 2.0 * half_width / h;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
    throw InvalidArgument(fmt::format("2L/h = {} is not an integer (L={}, h={})", cells, half_width, h));
  }
  return Grid(dim, -half_width, h, static_cast<std::size_t>(rounded) + 1);
}

Grid Grid::interval(double origin, double h, std::size_t nodes) {
  if (!(h > 0.0)) throw InvalidArgument("grid spacing must be positive");
  if (nodes < 2) throw InvalidArgument("an interval grid needs at least two nodes");
  return Grid(1, origin, h, nodes);
}

Point Grid::point(std::size_t k) const {
  if (dim_ == 1) return {coord(k), 0.0};
  return {coord(k % n_), coord(k / n_)};
}

std::optional<std::size_t> Grid::index_of(double x) const {
  const double s = (x - origin_) / h_;
  const double r = std::round(s);
  if (std::abs(s - r) > 1e-9 || r < 0.0 || r > static_cast<double>(n_ - 1)) return std::nullopt;
  return static_cast<std::size_t>(r);
}

std::optional<std::size_t> Grid::flat_index_of(Point p) const {
  auto i = index_of(p.x);
  if (!i) return std::nullopt;
  if (dim_ == 1) {
    if (p.y != 0.0) return std::nullopt;
    return i;
  }
  auto j = index_of(p.y);
  if (!j) return std::nullopt;
  return *j * n_ + *i;
}

bool Grid::is_edge(std::size_t k) const {
  if (dim_ == 1) return k == 0 || k + 1 == n_;
  const std::size_t i = k % n_;
  const std::size_t j = k / n_;
  return i == 0 || j == 0 || i + 1 == n_ || j + 1 == n_;
}

GridFunction::GridFunction(Grid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

GridFunction::GridFunction(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument(fmt::format("grid has {} nodes but {} values were given", grid_.size(), values_.size()));
  }
}

double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }

double GridFunction::edge_max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (grid_.is_edge(k)) m = std::max(m, values_[k]);
  }
  return m;
}

bool GridFunction::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<double> GridFunction::centerline() const {
  if (grid_.dim() == 1) return values_;
  auto row = grid_.index_of(0.0);
  if (!row) throw InvalidArgument("y = 0 is not a grid row");
  const std::size_t n = grid_.nodes_per_axis();
  return {values_.begin() + static_cast<std::ptrdiff_t>(*row * n),
          values_.begin() + static_cast<std::ptrdiff_t>((*row + 1) * n)};
}

}  // namespace kpplab
