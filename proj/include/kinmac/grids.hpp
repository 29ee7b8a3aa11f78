#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace kinmac {

/// Uniform cell-centered grid on the d-torus [0, L)^d, d in {1, 2}.
///
/// Cells are stored row-major: for d = 2 the flat index is iy * M + ix,
/// where ix runs along the first coordinate.
class TorusGrid {
 public:
  TorusGrid(int dim, int points_per_dim, double period);

  int dim() const { return dim_; }
  int points_per_dim() const { return points_; }
  double period() const { return period_; }
  double spacing() const { return period_ / points_; }
  std::size_t cell_count() const;

  /// Cell-center coordinate along one axis.
  double center(int i) const { return (i + 0.5) * spacing(); }
  /// Coordinates of a flat cell index (second entry is 0 when d = 1).
  std::array<double, 2> position(std::size_t cell) const;

  /// Periodic wrap of an axis index, valid for any integer.
  int wrap(int i) const;
  std::size_t flat_index(int ix, int iy = 0) const;

  /// Euclidean distance between two points using the minimal periodic
  /// displacement on each axis.
  double distance(std::array<double, 2> a, std::array<double, 2> b) const;

  bool operator==(const TorusGrid&) const = default;

 private:
  int dim_;
  int points_;
  double period_;
};

TorusGrid make_torus_grid(int dim, int points_per_dim, double period = 1.0);

/// Uniform cell-centered truncation [y_min, y_max] of the trait line.
class TraitGrid {
 public:
  TraitGrid(double y_min, double y_max, int points);

  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  int points() const { return points_; }
  double spacing() const { return (y_max_ - y_min_) / points_; }
  double center(int j) const { return y_min_ + (j + 0.5) * spacing(); }
  double edge(int j) const { return y_min_ + j * spacing(); }
  std::vector<double> centers() const;

  bool operator==(const TraitGrid&) const = default;

 private:
  double y_min_;
  double y_max_;
  int points_;
};

TraitGrid make_trait_grid(double y_min, double y_max, int points);

/// Midpoint rule h_y * sum_j values_j.
double integrate(std::span<const double> values, const TraitGrid& grid);

}  // namespace kinmac
