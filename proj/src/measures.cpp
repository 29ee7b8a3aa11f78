#include "kinmac/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kinmac/errors.hpp"

namespace kinmac {

namespace {

void require_p(int p) {
  if (p != 1 && p != 2 && p != 4) {
    throw PreconditionError("Wasserstein exponent must be 1, 2 or 4, got " + std::to_string(p));
  }
}

// Positive-mass cells of a normalized measure, in increasing trait order.
struct Atoms {
  std::vector<int> cell;
  std::vector<double> weight;
};

Atoms positive_cells(const GridMeasure& mu) {
  const double total = mu.mass();
  Atoms out;
  for (int j = 0; j < mu.grid.points(); ++j) {
    const double w = mu.cell_mass(j) / total;
    if (w > 0.0) {
      out.cell.push_back(j);
      out.weight.push_back(w);
    }
  }
  return out;
}

// Integral over a segment of length len of |d(s)|^p, d affine from d0 to d1.
double segment_power_integral(double d0, double d1, double len, int p) {
  switch (p) {
    case 1: {
      const double a0 = std::abs(d0), a1 = std::abs(d1);
      if (d0 * d1 >= 0.0) return 0.5 * len * (a0 + a1);
      return 0.5 * len * (d0 * d0 + d1 * d1) / (a0 + a1);
    }
    case 2:
      return len * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
    default: {
      const double s0 = d0 * d0, s1 = d1 * d1;
      return len * (s0 * s0 + s0 * d0 * d1 + s0 * s1 + d0 * d1 * s1 + s1 * s1) / 5.0;
    }
  }
}

double power(double x, int p) {
  const double a = std::abs(x);
  switch (p) {
    case 1: return a;
    case 2: return a * a;
    default: return (a * a) * (a * a);
  }
}

double root(double x, int p) {
  switch (p) {
    case 1: return x;
    case 2: return std::sqrt(x);
    default: return std::sqrt(std::sqrt(x));
  }
}

}  // namespace

GridMeasure::GridMeasure(TraitGrid g, std::vector<double> values)
    : grid(std::move(g)), density(std::move(values)) {
  if (density.size() != static_cast<std::size_t>(grid.points())) {
    throw PreconditionError("density length does not match trait grid");
  }
  for (double v : density) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw PreconditionError("density entries must be finite and nonnegative");
    }
  }
}

double gaussian_density(double y, double variance) {
  return std::exp(-0.5 * y * y / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

GridMeasure gaussian_on_grid(double mean, double variance, const TraitGrid& grid,
                             Warnings* warnings) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw PreconditionError("gaussian_on_grid: variance must be positive");
  }
  const double margin = 6.0 * std::sqrt(variance);
  if (warnings && (mean - grid.y_min() < margin || grid.y_max() - mean < margin)) {
    std::ostringstream msg;
    msg << "gaussian mean " << mean << " is within 6 standard deviations of the trait grid "
        << "boundary [" << grid.y_min() << ", " << grid.y_max() << "]";
    warnings->push_back(msg.str());
  }
  std::vector<double> values(static_cast<std::size_t>(grid.points()));
  for (int j = 0; j < grid.points(); ++j) {
    values[static_cast<std::size_t>(j)] = gaussian_density(grid.center(j) - mean, variance);
  }
  return GridMeasure(grid, std::move(values));
}

MomentSummary moments(const GridMeasure& mu) {
  const double m = mu.mass();
  if (!(m > 0.0)) throw PreconditionError("moments: measure has zero mass");
  const double h = mu.grid.spacing();
  double first = 0.0;
  for (int j = 0; j < mu.grid.points(); ++j) {
    first += mu.grid.center(j) * mu.density[static_cast<std::size_t>(j)];
  }
  const double mean = h * first / m;
  double second = 0.0, fourth = 0.0;
  for (int j = 0; j < mu.grid.points(); ++j) {
    const double d = mu.grid.center(j) - mean;
    const double w = mu.density[static_cast<std::size_t>(j)];
    second += d * d * w;
    fourth += d * d * d * d * w;
  }
  return {m, mean, h * second / m, h * fourth / m};
}

double raw_moment(const GridMeasure& mu, int k) {
  const double m = mu.mass();
  if (!(m > 0.0)) throw PreconditionError("raw_moment: measure has zero mass");
  double acc = 0.0;
  for (int j = 0; j < mu.grid.points(); ++j) {
    acc += std::pow(mu.grid.center(j), k) * mu.density[static_cast<std::size_t>(j)];
  }
  return mu.grid.spacing() * acc / m;
}

void require_probability(const GridMeasure& mu, const char* where) {
  const double m = mu.mass();
  if (!(std::abs(m - 1.0) <= kProbabilityTolerance)) {
    std::ostringstream msg;
    msg << where << ": input is not a probability measure (mass " << m << ")";
    throw PreconditionError(msg.str());
  }
}

double quantile(const GridMeasure& mu, double u) {
  if (!(u > 0.0 && u < 1.0)) throw PreconditionError("quantile: u must lie in (0, 1)");
  require_probability(mu, "quantile");
  const Atoms atoms = positive_cells(mu);
  const double h = mu.grid.spacing();
  double cum = 0.0;
  for (std::size_t k = 0; k < atoms.cell.size(); ++k) {
    const double w = atoms.weight[k];
    if (cum + w >= u) return mu.grid.edge(atoms.cell[k]) + h * std::clamp((u - cum) / w, 0.0, 1.0);
    cum += w;
  }
  // Rounding left the cumulative sum just below u.
  return mu.grid.edge(atoms.cell.back()) + h;
}

double wasserstein(const GridMeasure& mu, const GridMeasure& nu, int p) {
  require_p(p);
  require_probability(mu, "wasserstein");
  require_probability(nu, "wasserstein");
  const Atoms a = positive_cells(mu);
  const Atoms b = positive_cells(nu);
  const double ha = mu.grid.spacing(), hb = nu.grid.spacing();

  std::size_t i = 0, j = 0;
  double start_a = 0.0, start_b = 0.0, u = 0.0, total = 0.0;
  while (i < a.cell.size() && j < b.cell.size()) {
    const double wa = a.weight[i], wb = b.weight[j];
    const double end_a = start_a + wa, end_b = start_b + wb;
    const double u1 = std::min(end_a, end_b);
    if (u1 > u) {
      const double ea = mu.grid.edge(a.cell[i]), eb = nu.grid.edge(b.cell[j]);
      const double d0 = (ea + ha * (u - start_a) / wa) - (eb + hb * (u - start_b) / wb);
      const double d1 = (ea + ha * (u1 - start_a) / wa) - (eb + hb * (u1 - start_b) / wb);
      total += segment_power_integral(d0, d1, u1 - u, p);
      u = u1;
    }
    if (end_a <= u1) {
      start_a = end_a;
      ++i;
    }
    if (end_b <= u1) {
      start_b = end_b;
      ++j;
    }
  }
  return root(total, p);
}

double wasserstein_oracle(const GridMeasure& mu, const GridMeasure& nu, int p) {
  require_p(p);
  require_probability(mu, "wasserstein_oracle");
  require_probability(nu, "wasserstein_oracle");
  const Atoms a = positive_cells(mu);
  const Atoms b = positive_cells(nu);

  std::size_t i = 0, j = 0;
  double left_a = a.weight.empty() ? 0.0 : a.weight[0];
  double left_b = b.weight.empty() ? 0.0 : b.weight[0];
  double cost = 0.0;
  while (i < a.cell.size() && j < b.cell.size()) {
    const double moved = std::min(left_a, left_b);
    cost += moved * power(mu.grid.center(a.cell[i]) - nu.grid.center(b.cell[j]), p);
    left_a -= moved;
    left_b -= moved;
    if (left_a <= 0.0 && ++i < a.cell.size()) left_a = a.weight[i];
    if (left_b <= 0.0 && ++j < b.cell.size()) left_b = b.weight[j];
  }
  return root(cost, p);
}

double l1_distance(const GridMeasure& a, const GridMeasure& b) {
  if (!(a.grid == b.grid)) throw PreconditionError("l1_distance: grids differ");
  double acc = 0.0;
  for (std::size_t j = 0; j < a.density.size(); ++j) acc += std::abs(a.density[j] - b.density[j]);
  return a.grid.spacing() * acc;
}

}  // namespace kinmac
