#pragma once

#include <string>
#include <vector>

#include "kinmac/grids.hpp"

namespace kinmac {

/// Inputs whose mass differs from 1 by more than this are not probabilities.
inline constexpr double kProbabilityTolerance = 1e-8;

/// Piecewise-constant density on a trait grid (value per cell, w.r.t. dy).
struct GridMeasure {
  TraitGrid grid;
  std::vector<double> density;

  GridMeasure(TraitGrid g, std::vector<double> values);

  double mass() const { return integrate(density, grid); }
  /// Mass carried by cell j, h_y * density_j.
  double cell_mass(int j) const { return grid.spacing() * density[static_cast<std::size_t>(j)]; }
};

struct MomentSummary {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double fourth_central = 0.0;
};

using Warnings = std::vector<std::string>;

/// Samples the normalized Gaussian of the given variance at cell centers.
/// The result is not renormalized; its mass defect is a diagnostic.
/// Appends a warning when the mean sits closer than 6 standard deviations
/// to either end of the grid.
GridMeasure gaussian_on_grid(double mean, double variance, const TraitGrid& grid,
                             Warnings* warnings = nullptr);

/// Density of Gamma_V(y) = exp(-y^2 / 2V) / sqrt(2 pi V).
double gaussian_density(double y, double variance);

MomentSummary moments(const GridMeasure& mu);

/// Raw moment of order k of mu / mass(mu), by midpoint quadrature.
double raw_moment(const GridMeasure& mu, int k);

/// Throws PreconditionError unless |mass - 1| <= kProbabilityTolerance.
void require_probability(const GridMeasure& mu, const char* where);

/// Generalized inverse of the piecewise-linear CDF built from cell masses.
double quantile(const GridMeasure& mu, double u);

/// Exact W_p, p in {1, 2, 4}, between piecewise-constant densities.
///
/// The quantile functions of both inputs are piecewise linear; the merged
/// breakpoints split [0, 1] into segments on which |F^-1 - G^-1|^p is
/// integrated in closed form. Grids may differ.
double wasserstein(const GridMeasure& mu, const GridMeasure& nu, int p);

/// Same distance computed as a discrete transport problem: every cell is an
/// atom at its center and mass moves by the north-west-corner rule on the
/// sorted atoms. Differs from `wasserstein` by at most one cell width.
double wasserstein_oracle(const GridMeasure& mu, const GridMeasure& nu, int p);

/// L1 distance between two densities on the same grid.
double l1_distance(const GridMeasure& a, const GridMeasure& b);

}  // namespace kinmac
