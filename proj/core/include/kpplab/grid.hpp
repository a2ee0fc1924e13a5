#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace kpplab {

/// Spatial point; `y` is ignored in one dimension.
struct Point {
  double x = 0.0;
  double y = 0.0;

  double norm_squared() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm_squared()); }
};

/// Uniform node-centred grid. In 2D the grid is square with the same
/// origin, spacing and node count on both axes; flat index k = j * n + i.
class Grid {
 public:
  /// Nodes -L, -L + h, ..., L on every axis. Requires 2L/h to be an integer.
  static Grid symmetric(int dim, double half_width, double h);
  /// One-dimensional nodes origin + i h, i = 0..nodes-1.
  static Grid interval(double origin, double h, std::size_t nodes);

  int dim() const { return dim_; }
  double h() const { return h_; }
  double origin() const { return origin_; }
  std::size_t nodes_per_axis() const { return n_; }
  std::size_t size() const { return dim_ == 1 ? n_ : n_ * n_; }
  double lower() const { return origin_; }
  double upper() const { return origin_ + static_cast<double>(n_ - 1) * h_; }
  double extent() const { return upper() - lower(); }
  double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }

  double coord(std::size_t i) const { return origin_ + static_cast<double>(i) * h_; }
  Point point(std::size_t k) const;

  /// Index of the node at coordinate `x`, if `x` is a node up to 1e-9 h.
  std::optional<std::size_t> index_of(double x) const;
  /// Flat index of the node at `p`, if `p` is a node.
  std::optional<std::size_t> flat_index_of(Point p) const;

  /// True for nodes on the outermost layer of the grid.
  bool is_edge(std::size_t k) const;

  bool operator==(const Grid&) const = default;

 private:
  Grid(int dim, double origin, double h, std::size_t n) : dim_(dim), h_(h), origin_(origin), n_(n) {}

  int dim_ = 1;
  double h_ = 1.0;
  double origin_ = 0.0;
  std::size_t n_ = 0;
};

/// Scalar field sampled on a Grid.
class GridFunction {
 public:
  explicit GridFunction(Grid grid, double fill = 0.0);
  GridFunction(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  double max() const;
  double min() const;
  /// Largest value over the outermost layer of nodes.
  double edge_max() const;
  bool all_finite() const;

  /// Values along the row y = 0 (2D) or the whole field (1D).
  std::vector<double> centerline() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

}  // namespace kpplab
