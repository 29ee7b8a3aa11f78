#include "kinmac/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kinmac/diffusion.hpp"
#include "kinmac/errors.hpp"
#include "kinmac/measures.hpp"

namespace kinmac {

double gaussian_deviation(const KineticState& state, double A) {
  if (!(A > 0.0)) throw PreconditionError("gaussian_deviation: A must be positive");
  double worst = 0.0;
  for (std::size_t c = 0; c < state.space.cell_count(); ++c) {
    const auto col = state.column(c);
    const double N = integrate(col, state.trait);
    if (!(N >= kPopulationFloor)) {
      throw InvariantViolation("gaussian_deviation: vanishing population in cell " +
                               std::to_string(c));
    }
    std::vector<double> profile(col.begin(), col.end());
    for (double& v : profile) v /= N;
    GridMeasure mu(state.trait, std::move(profile));
    const double z = moments(mu).mean;
    worst = std::max(worst, wasserstein(mu, gaussian_on_grid(z, A, state.trait), 2));
  }
  return worst;
}

DeviationRecord deviation_record(const KineticState& state, double A) {
  const MacroSnapshot mom = kinetic_moments(state);
  DeviationRecord r;
  r.t = state.t;
  r.gauss_dev = gaussian_deviation(state, A);
  r.v_max = *std::max_element(mom.V.begin(), mom.V.end());
  r.mass_leak = state.leaked_mass;
  return r;
}

namespace {

double sup_over(const std::vector<double>& t, const std::vector<std::vector<double>>& field,
                double t_from) {
  double worst = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_from) continue;
    for (double v : field[k]) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

}  // namespace

double ResidualFields::sup_norm_N(double t_from) const { return sup_over(t, phi_N, t_from); }
double ResidualFields::sup_norm_Z(double t_from) const { return sup_over(t, phi_Z, t_from); }

double ResidualFields::sup_norm(double t_from) const {
  double worst = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_from) continue;
    double a = 0.0, b = 0.0;
    for (double v : phi_N[k]) a = std::max(a, std::abs(v));
    for (double v : phi_Z[k]) b = std::max(b, std::abs(v));
    worst = std::max(worst, a + b);
  }
  return worst;
}

ResidualFields kbm_residuals(const std::vector<MacroSnapshot>& trajectory, const TorusGrid& space,
                             const Environment& env, double A) {
  if (trajectory.size() < 3) throw PreconditionError("kbm_residuals: need at least 3 snapshots");
  const std::size_t cells = space.cell_count();
  ResidualFields out;
  for (std::size_t k = 1; k < trajectory.size(); ++k) {
    const double gap = trajectory[k].t - trajectory[k - 1].t;
    if (!(gap > 0.0)) throw PreconditionError("kbm_residuals: snapshot times must increase");
    out.snapshot_spacing = std::max(out.snapshot_spacing, gap);
  }
  for (std::size_t k = 1; k + 1 < trajectory.size(); ++k) {
    const MacroSnapshot& prev = trajectory[k - 1];
    const MacroSnapshot& cur = trajectory[k];
    const MacroSnapshot& next = trajectory[k + 1];
    if (cur.N.size() != cells || cur.Z.size() != cells) {
      throw PreconditionError("kbm_residuals: snapshot size does not match grid");
    }
    const double span = next.t - prev.t;
    const auto lap_N = periodic_laplacian(cur.N, space);
    const auto lap_Z = periodic_laplacian(cur.Z, space);
    const auto grad_NZ = periodic_gradient_dot(cur.N, cur.Z, space);
    std::vector<double> phi_N(cells), phi_Z(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      const double N = cur.N[c];
      if (!(N >= kPopulationFloor)) throw InvariantViolation("kbm_residuals: N below floor");
      const double gap = cur.Z[c] - env(cur.t, space.position(c));
      const double dN = (next.N[c] - prev.N[c]) / span;
      const double dZ = (next.Z[c] - prev.Z[c]) / span;
      phi_N[c] = (dN - lap_N[c]) / N - 1.0 + 0.5 * gap * gap + N;
      phi_Z[c] = dZ - lap_Z[c] - 2.0 * grad_NZ[c] / N + A * gap;
    }
    out.t.push_back(cur.t);
    out.phi_N.push_back(std::move(phi_N));
    out.phi_Z.push_back(std::move(phi_Z));
  }
  return out;
}

double holder_quotient(const SpaceTimeField& field, double theta, std::size_t max_pairs,
                       std::uint64_t seed) {
  if (!(theta > 0.0 && theta < 1.0)) throw PreconditionError("holder_quotient: theta must be in (0, 1)");
  const std::size_t cells = field.space.cell_count();
  const std::size_t times = field.times.size();
  if (field.values.size() != times) throw PreconditionError("holder_quotient: time/value mismatch");
  for (const auto& row : field.values) {
    if (row.size() != cells) throw PreconditionError("holder_quotient: field size does not match grid");
  }
  const std::size_t points = cells * times;
  if (points < 2) return 0.0;

  auto quotient = [&](std::size_t p, std::size_t q) {
    const std::size_t kp = p / cells, cp = p % cells, kq = q / cells, cq = q % cells;
    const double dist = std::abs(field.times[kp] - field.times[kq]) +
                        field.space.distance(field.space.position(cp), field.space.position(cq));
    if (!(dist > 0.0)) return 0.0;
    return std::abs(field.values[kp][cp] - field.values[kq][cq]) / std::pow(dist, theta);
  };

  double worst = 0.0;
  const double total_pairs = 0.5 * static_cast<double>(points) * static_cast<double>(points - 1);
  if (total_pairs <= static_cast<double>(max_pairs)) {
    for (std::size_t p = 0; p < points; ++p) {
      for (std::size_t q = p + 1; q < points; ++q) worst = std::max(worst, quotient(p, q));
    }
    return worst;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < max_pairs; ++i) {
    const std::size_t p = static_cast<std::size_t>(rng() % points);
    const std::size_t q = static_cast<std::size_t>(rng() % points);
    worst = std::max(worst, quotient(p, q));
  }
  return worst;
}

PowerLawFit fit_power_law(const std::vector<double>& gammas, const std::vector<double>& errors) {
  if (gammas.size() != errors.size()) throw PreconditionError("fit_power_law: length mismatch");
  if (gammas.size() < 3) throw PreconditionError("fit_power_law: need at least 3 points");
  const auto n = static_cast<double>(gammas.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0) || !(errors[i] > 0.0)) {
      throw PreconditionError("fit_power_law: gammas and errors must be positive");
    }
    x.push_back(std::log(gammas[i]));
    y.push_back(std::log(errors[i]));
    sx += x.back();
    sy += y.back();
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw PreconditionError("fit_power_law: gammas must not all be equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
  }
  PowerLawFit fit;
  fit.theta = -slope;
  fit.c = std::exp(intercept);
  // A flat series is fitted exactly by theta = 0.
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

double burn_in_time(double gamma, double dt) { return std::max(5.0 * dt, 1.0 / std::sqrt(gamma)); }

}  // namespace kinmac
