#pragma once

#include <span>
#include <vector>

#include "kinmac/grids.hpp"
#include "kinmac/measures.hpp"

namespace kinmac {

/// Segregation kernel of the infinitesimal model: offspring trait is the
/// midparent value plus a centered Gaussian of variance A/2.
///
/// Midparent values (y_a + y_b)/2 of cell centers live on the half-step
/// lattice y_min + (k+1) h/2, k = a + b, so the kernel is tabulated once at
/// offsets s h/2, s = 2j - k. Entries below exp(-72) relative to the peak
/// (beyond 12 standard deviations) are dropped from the fast path.
class ReproductionKernel {
 public:
  ReproductionKernel(double A, TraitGrid grid);

  /// Test hook: multiplies every kernel sample by `scale`, which breaks mass
  /// conservation of the fast path on purpose.
  static ReproductionKernel with_fault_scale(double A, TraitGrid grid, double scale);

  double A() const { return A_; }
  const TraitGrid& grid() const { return grid_; }
  /// Kernel value at half-step offset s, s in [-(2M-2), 2M-2].
  const double& at(int s) const { return table_[static_cast<std::size_t>(s + offset_)]; }
  /// Largest |s| kept by the fast path.
  int half_width() const { return half_width_; }
  /// Mass of the sampled kernel centered on a cell center, h * sum_j Gamma(y_j).
  double sampled_mass() const;

 private:
  double A_;
  TraitGrid grid_;
  int offset_;
  int half_width_;
  std::vector<double> table_;
};

/// Reusable scratch space for apply_T_into.
struct ReproductionWorkspace {
  std::vector<double> midparent;
};

/// Reference evaluation of T by the direct triple sum
/// T(mu)(y_j) = h^2 sum_{a,b} Gamma_{A/2}(y_j - (y_a + y_b)/2) mu_a mu_b.
/// O(M^3); kernel values are evaluated independently of ReproductionKernel's
/// table.
GridMeasure apply_T_oracle(const GridMeasure& mu, const ReproductionKernel& kernel);

/// T by self-convolution onto the half-step midparent lattice followed by a
/// banded Toeplitz product with the segregation kernel. O(M^2).
GridMeasure apply_T_fast(const GridMeasure& mu, const ReproductionKernel& kernel);

/// Unchecked core of apply_T_fast, used per spatial column by the kinetic
/// solver. `density` must be a probability density on kernel.grid(). The
/// summation order is fixed, so the result does not depend on the caller's
/// threading.
void apply_T_into(std::span<const double> density, const ReproductionKernel& kernel,
                  std::span<double> out, ReproductionWorkspace& workspace);

/// W_p(T mu, T nu) / W_p(mu, nu) for equal-mean inputs, p in {2, 4}.
double contraction_ratio(const GridMeasure& mu, const GridMeasure& nu,
                         const ReproductionKernel& kernel, int p);

}  // namespace kinmac
