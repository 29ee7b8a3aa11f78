#pragma once

#include <random>
#include <vector>

#include "kinmac/grids.hpp"
#include "kinmac/measures.hpp"

namespace kinmac {

/// Finite Gaussian mixture with an analytic mean; sampled on demand.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;

  double mean() const;
  /// Sampled density; mass is 1 up to tail and quadrature error.
  GridMeasure sample(const TraitGrid& grid) const;
  GaussianMixture shifted(double offset) const;
};

/// One to three components with means in center +- 0.5 sqrt(A) and
/// variances in [0.15 A, A].
GaussianMixture random_mixture(std::mt19937_64& rng, double center, double A);

/// Two random mixtures whose analytic means agree, so their sampled means
/// agree to quadrature accuracy.
std::pair<GridMeasure, GridMeasure> random_equal_mean_pair(std::mt19937_64& rng,
                                                           const TraitGrid& grid, double center,
                                                           double A);

}  // namespace kinmac
