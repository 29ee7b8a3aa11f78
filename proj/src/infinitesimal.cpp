#include "kinmac/infinitesimal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kinmac/errors.hpp"

namespace kinmac {

namespace {

void require_matching(const GridMeasure& mu, const ReproductionKernel& kernel, const char* where) {
  if (!(mu.grid == kernel.grid())) {
    throw PreconditionError(std::string(where) + ": measure and kernel grids differ");
  }
  require_probability(mu, where);
}

}  // namespace

ReproductionKernel::ReproductionKernel(double A, TraitGrid grid)
    : A_(A), grid_(std::move(grid)), offset_(2 * grid_.points() - 2), half_width_(0) {
  if (!(A > 0.0) || !std::isfinite(A)) throw PreconditionError("A must be positive");
  const double variance = 0.5 * A;
  const double half_step = 0.5 * grid_.spacing();
  table_.resize(static_cast<std::size_t>(2 * offset_ + 1));
  const double cutoff = 12.0 * std::sqrt(variance);
  for (int s = -offset_; s <= offset_; ++s) {
    table_[static_cast<std::size_t>(s + offset_)] = gaussian_density(s * half_step, variance);
    if (std::abs(s) * half_step <= cutoff) half_width_ = std::max(half_width_, std::abs(s));
  }
}

ReproductionKernel ReproductionKernel::with_fault_scale(double A, TraitGrid grid, double scale) {
  ReproductionKernel k(A, std::move(grid));
  for (double& v : k.table_) v *= scale;
  return k;
}

double ReproductionKernel::sampled_mass() const {
  // Whole-cell offsets are the even half-step offsets.
  double acc = 0.0;
  for (int s = -offset_ + (offset_ % 2); s <= offset_; s += 2) acc += at(s);
  return grid_.spacing() * acc;
}

GridMeasure apply_T_oracle(const GridMeasure& mu, const ReproductionKernel& kernel) {
  require_matching(mu, kernel, "apply_T_oracle");
  const TraitGrid& g = mu.grid;
  const int m = g.points();
  const double h = g.spacing();
  const double variance = 0.5 * kernel.A();
  // Gamma at y_j - (y_a + y_b)/2 only depends on 2j - a - b; evaluate each
  // distinct offset from the coordinates once.
  std::vector<double> table(static_cast<std::size_t>(4 * m - 3));
  for (int s = -(2 * m - 2); s <= 2 * m - 2; ++s) {
    // Any (j, a, b) with 2j - a - b = s represents this offset.
    const int j = std::max(0, (s + 1) / 2);
    const int sum = 2 * j - s;
    const int a = std::min(sum, m - 1);
    const int b = sum - a;
    table[static_cast<std::size_t>(s + 2 * m - 2)] =
        gaussian_density(g.center(j) - 0.5 * (g.center(a) + g.center(b)), variance);
  }
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < m; ++j) {
    double acc = 0.0;
    for (int a = 0; a < m; ++a) {
      const double ma = mu.density[static_cast<std::size_t>(a)];
      if (ma == 0.0) continue;
      double inner = 0.0;
      for (int b = 0; b < m; ++b) {
        inner += table[static_cast<std::size_t>(2 * j - a - b + 2 * m - 2)] *
                 mu.density[static_cast<std::size_t>(b)];
      }
      acc += ma * inner;
    }
    out[static_cast<std::size_t>(j)] = h * h * acc;
  }
  return GridMeasure(g, std::move(out));
}

void apply_T_into(std::span<const double> density, const ReproductionKernel& kernel,
                  std::span<double> out, ReproductionWorkspace& workspace) {
  const int m = kernel.grid().points();
  const double h = kernel.grid().spacing();
  auto& c = workspace.midparent;
  c.assign(static_cast<std::size_t>(2 * m - 1), 0.0);

  int lo = 0, hi = m - 1;
  while (lo <= hi && density[static_cast<std::size_t>(lo)] == 0.0) ++lo;
  while (hi >= lo && density[static_cast<std::size_t>(hi)] == 0.0) --hi;
  if (lo > hi) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }

  // c_k = sum_{a+b=k} mu_a mu_b, accumulated row by row in a fixed order.
  const double* d = density.data();
  double* cc = c.data();
  for (int a = lo; a <= hi; ++a) {
    const double da = d[a];
    cc[2 * a] += da * da;
    const double twice = 2.0 * da;
    double* row = cc + a;
    for (int b = a + 1; b <= hi; ++b) row[b] += twice * d[b];
  }

  // Gamma is even, so Gamma(2j - k) = Gamma(k - 2j) and the window over k is
  // read forward through the table.
  const int width = kernel.half_width();
  const double* g = &kernel.at(0);
  const double scale = h * h;
  for (int j = 0; j < m; ++j) {
    const int k0 = std::max(2 * j - width, 2 * lo);
    const int k1 = std::min(2 * j + width, 2 * hi);
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    int k = k0;
    const double* gk = g + (k0 - 2 * j);
    for (; k + 3 <= k1; k += 4, gk += 4) {
      acc0 += cc[k] * gk[0];
      acc1 += cc[k + 1] * gk[1];
      acc2 += cc[k + 2] * gk[2];
      acc3 += cc[k + 3] * gk[3];
    }
    for (; k <= k1; ++k, ++gk) acc0 += cc[k] * gk[0];
    out[static_cast<std::size_t>(j)] = scale * ((acc0 + acc1) + (acc2 + acc3));
  }
}

GridMeasure apply_T_fast(const GridMeasure& mu, const ReproductionKernel& kernel) {
  require_matching(mu, kernel, "apply_T_fast");
  std::vector<double> out(mu.density.size());
  ReproductionWorkspace ws;
  apply_T_into(mu.density, kernel, out, ws);
  return GridMeasure(mu.grid, std::move(out));
}

double contraction_ratio(const GridMeasure& mu, const GridMeasure& nu,
                         const ReproductionKernel& kernel, int p) {
  if (p != 2 && p != 4) throw PreconditionError("contraction_ratio: p must be 2 or 4");
  const double mean_mu = moments(mu).mean, mean_nu = moments(nu).mean;
  if (std::abs(mean_mu - mean_nu) > 1e-9) {
    std::ostringstream msg;
    msg << "contraction_ratio: means differ (" << mean_mu << " vs " << mean_nu << ")";
    throw PreconditionError(msg.str());
  }
  const double before = wasserstein(mu, nu, p);
  if (!(before > 0.0)) throw PreconditionError("contraction_ratio: inputs are identical");
  const double after = wasserstein(apply_T_fast(mu, kernel), apply_T_fast(nu, kernel), p);
  return after / before;
}

}  // namespace kinmac
