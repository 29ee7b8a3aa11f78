#include "kinmac/random_measures.hpp"

#include <cmath>

namespace kinmac {

double GaussianMixture::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) m += weights[i] * means[i];
  return m;
}

GridMeasure GaussianMixture::sample(const TraitGrid& grid) const {
  std::vector<double> values(static_cast<std::size_t>(grid.points()), 0.0);
  for (int j = 0; j < grid.points(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i] * gaussian_density(grid.center(j) - means[i], variances[i]);
    }
    values[static_cast<std::size_t>(j)] = acc;
  }
  return GridMeasure(grid, std::move(values));
}

GaussianMixture GaussianMixture::shifted(double offset) const {
  GaussianMixture out = *this;
  for (double& m : out.means) m += offset;
  return out;
}

GaussianMixture random_mixture(std::mt19937_64& rng, double center, double A) {
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double sd = std::sqrt(A);
  GaussianMixture mix;
  const int k = count(rng);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const double w = 0.1 + unit(rng);
    mix.weights.push_back(w);
    total += w;
    mix.means.push_back(center + sd * (unit(rng) - 0.5));
    mix.variances.push_back(A * (0.15 + 0.85 * unit(rng)));
  }
  for (double& w : mix.weights) w /= total;
  return mix;
}

std::pair<GridMeasure, GridMeasure> random_equal_mean_pair(std::mt19937_64& rng,
                                                           const TraitGrid& grid, double center,
                                                           double A) {
  const GaussianMixture a = random_mixture(rng, center, A);
  const GaussianMixture b = random_mixture(rng, center, A);
  return {a.sample(grid), b.shifted(a.mean() - b.mean()).sample(grid)};
}

}  // namespace kinmac
