#include "kinmac/grids.hpp"

#include <cmath>
#include <string>

#include "kinmac/errors.hpp"

namespace kinmac {

TorusGrid::TorusGrid(int dim, int points_per_dim, double period)
    : dim_(dim), points_(points_per_dim), period_(period) {
  if (dim != 1 && dim != 2) {
    throw PreconditionError("torus dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (points_per_dim < 4) {
    throw PreconditionError("too few points: torus grid needs at least 4 per dimension, got " +
                            std::to_string(points_per_dim));
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw PreconditionError("torus period must be positive");
  }
}

std::size_t TorusGrid::cell_count() const {
  return dim_ == 1 ? static_cast<std::size_t>(points_)
                   : static_cast<std::size_t>(points_) * static_cast<std::size_t>(points_);
}

std::array<double, 2> TorusGrid::position(std::size_t cell) const {
  const auto m = static_cast<std::size_t>(points_);
  if (dim_ == 1) return {center(static_cast<int>(cell)), 0.0};
  return {center(static_cast<int>(cell % m)), center(static_cast<int>(cell / m))};
}

int TorusGrid::wrap(int i) const {
  const int r = i % points_;
  return r < 0 ? r + points_ : r;
}

std::size_t TorusGrid::flat_index(int ix, int iy) const {
  const auto m = static_cast<std::size_t>(points_);
  if (dim_ == 1) return static_cast<std::size_t>(wrap(ix));
  return static_cast<std::size_t>(wrap(iy)) * m + static_cast<std::size_t>(wrap(ix));
}

double TorusGrid::distance(std::array<double, 2> a, std::array<double, 2> b) const {
  double sum = 0.0;
  for (int k = 0; k < dim_; ++k) {
    double d = std::fmod(std::abs(a[k] - b[k]), period_);
    d = std::min(d, period_ - d);
    sum += d * d;
  }
  return std::sqrt(sum);
}

TorusGrid make_torus_grid(int dim, int points_per_dim, double period) {
  return TorusGrid(dim, points_per_dim, period);
}

TraitGrid::TraitGrid(double y_min, double y_max, int points)
    : y_min_(y_min), y_max_(y_max), points_(points) {
  if (!std::isfinite(y_min) || !std::isfinite(y_max) || !(y_min < y_max)) {
    throw PreconditionError("trait grid bounds must satisfy y_min < y_max");
  }
  if (points < 16) {
    throw PreconditionError("trait grid needs at least 16 points, got " + std::to_string(points));
  }
}

std::vector<double> TraitGrid::centers() const {
  std::vector<double> out(static_cast<std::size_t>(points_));
  for (int j = 0; j < points_; ++j) out[static_cast<std::size_t>(j)] = center(j);
  return out;
}

TraitGrid make_trait_grid(double y_min, double y_max, int points) {
  return TraitGrid(y_min, y_max, points);
}

double integrate(std::span<const double> values, const TraitGrid& grid) {
  if (values.size() != static_cast<std::size_t>(grid.points())) {
    throw PreconditionError("integrate: got " + std::to_string(values.size()) +
                            " values for a trait grid of " + std::to_string(grid.points()) +
                            " cells");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return grid.spacing() * sum;
}

}  // namespace kinmac
