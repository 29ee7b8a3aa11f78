#pragma once

#include <vector>

#include "kinmac/diffusion.hpp"
#include "kinmac/environment.hpp"
#include "kinmac/grids.hpp"
#include "kinmac/sim_solver.hpp"

namespace kinmac {

/// Macroscopic fields in the (N, Y = N Z) variables.
struct MacroState {
  TorusGrid space;
  double t = 0.0;
  std::vector<double> N;
  std::vector<double> Y;

  MacroState(TorusGrid s, double time);
  MacroState(TorusGrid s, double time, std::vector<double> n, std::vector<double> z_mean);

  std::vector<double> Z() const;
};

/// Population and mean trait from shared initial data.
MacroState init_macro_state(const TorusGrid& space, const InitialData& init);

/// Time stepping of the Kirkpatrick-Barton system written for (N, Y):
///
///   d_t N - Lap N = g N,
///   d_t Y - Lap Y = g Y - A (Y - y_opt N),   g = 1 - (Y - y_opt N)^2 / (2 N^2) - N.
///
/// Strang split: half a step of Crank-Nicolson (or ADI in 2-D) diffusion of
/// both fields, a full step of the zeroth-order terms by the explicit
/// two-stage Heun scheme, then the second diffusion half step.
class KbmSolver {
 public:
  KbmSolver(TorusGrid space, Environment env, double A, double dt);

  void step(MacroState& m, double dt_override = 0.0) const;

  double A() const { return A_; }
  double dt() const { return dt_; }
  const Environment& environment() const { return env_; }

  /// min(0.1, 1 / (4 sup |rate|)) over the current state, where the rate
  /// bounds the Jacobian of the reaction terms.
  double dt_max(const MacroState& m) const;

 private:
  const PeriodicDiffusion& diffusion_for(double dt) const;

  TorusGrid space_;
  Environment env_;
  double A_;
  double dt_;
  PeriodicDiffusion diffusion_;
  mutable std::vector<PeriodicDiffusion> short_diffusion_;
};

/// Convenience single step that builds a solver for the call.
MacroState kbm_step(const MacroState& m, const Environment& env, double A, double dt);

struct KbmTrajectory {
  std::vector<MacroSnapshot> snapshots;
  MacroState final_state;
  std::size_t steps = 0;
};

/// Snapshots at the start, every `snapshot_stride` steps, and at the end.
KbmTrajectory run_kbm(const MacroState& m0, const KbmSolver& solver, double t_end,
                      std::size_t snapshot_stride);

struct HomogeneousPoint {
  double t;
  double N;
  double Z;
};

/// Spatially homogeneous reduction of the KBM,
///   N' = (1 - (Z - y_opt)^2 / 2 - N) N,   Z' = -A (Z - y_opt),
/// integrated by adaptive Dormand-Prince with tolerances 1e-12. Returns the
/// solution at each of `times` (ascending, starting at or after 0).
std::vector<HomogeneousPoint> homogeneous_reference(double N0, double Z0, const Environment& env,
                                                    double A, const std::vector<double>& times);

}  // namespace kinmac
