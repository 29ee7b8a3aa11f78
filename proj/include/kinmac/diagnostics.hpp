#pragma once

#include <cstdint>
#include <vector>

#include "kinmac/environment.hpp"
#include "kinmac/grids.hpp"
#include "kinmac/sim_solver.hpp"

namespace kinmac {

/// max_x W2(n(x,.)/N(x), Gamma_A(. - Z(x))) with the Gaussian sampled on the
/// state's trait grid.
double gaussian_deviation(const KineticState& state, double A);

struct DeviationRecord {
  double t = 0.0;
  double gauss_dev = 0.0;
  double v_max = 0.0;
  double mass_leak = 0.0;
};

DeviationRecord deviation_record(const KineticState& state, double A);

/// Forcing terms recovered from a moment trajectory by solving the
/// Kirkpatrick-Barton equations for their residuals:
///   phi_N = (d_t N - Lap N) / N - 1 + (Z - y_opt)^2 / 2 + N
///   phi_Z = d_t Z - Lap Z - 2 grad N . grad Z / N + A (Z - y_opt)
/// Time derivatives are centered differences between neighboring snapshots,
/// so fields exist at interior snapshots only. Differencing error is
/// O(snapshot_spacing^2 + h_x^2).
struct ResidualFields {
  std::vector<double> t;
  std::vector<std::vector<double>> phi_N;
  std::vector<std::vector<double>> phi_Z;
  double snapshot_spacing = 0.0;  ///< largest gap between consecutive snapshots

  /// max over interior snapshots with t >= t_from of ||phi_N||_inf + ||phi_Z||_inf.
  double sup_norm(double t_from = 0.0) const;
  double sup_norm_N(double t_from = 0.0) const;
  double sup_norm_Z(double t_from = 0.0) const;
};

ResidualFields kbm_residuals(const std::vector<MacroSnapshot>& trajectory, const TorusGrid& space,
                             const Environment& env, double A);

/// Scalar field sampled on a space-time lattice: values[k][cell] at times[k].
struct SpaceTimeField {
  TorusGrid space;
  std::vector<double> times;
  std::vector<std::vector<double>> values;
};

inline constexpr std::size_t kHolderPairCap = 1'000'000;

/// max |f(t,x) - f(s,y)| / (|t - s| + d(x,y))^theta over lattice pairs.
///
/// All pairs are used when there are at most `max_pairs` of them; otherwise
/// `max_pairs` pairs are drawn uniformly with a seeded generator. The draw
/// sequence depends only on the seed, so a larger cap samples a superset.
double holder_quotient(const SpaceTimeField& field, double theta,
                       std::size_t max_pairs = kHolderPairCap, std::uint64_t seed = 0x5eed);

struct PowerLawFit {
  double theta = 0.0;  ///< fitted decay exponent in error ~ c / gamma^theta
  double c = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(error) = log(c) - theta log(gamma).
PowerLawFit fit_power_law(const std::vector<double>& gammas, const std::vector<double>& errors);

/// Burn-in time max(5 dt, gamma^(-1/2)).
double burn_in_time(double gamma, double dt);

}  // namespace kinmac
