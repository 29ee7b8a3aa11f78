#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kinmac/diffusion.hpp"
#include "kinmac/environment.hpp"
#include "kinmac/grids.hpp"
#include "kinmac/infinitesimal.hpp"

namespace kinmac {

/// Populations below this size cannot be normalized meaningfully.
inline constexpr double kPopulationFloor = 1e-12;

/// Kinetic density n(t, x, y) stored as [spatial cell][trait cell].
struct KineticState {
  TorusGrid space;
  TraitGrid trait;
  double t = 0.0;
  std::vector<double> n;
  /// Mass lost through the ends of the trait grid since t = 0.
  double leaked_mass = 0.0;

  KineticState(TorusGrid s, TraitGrid y, double time);

  std::span<double> column(std::size_t cell);
  std::span<const double> column(std::size_t cell) const;
  double total_mass() const;
};

/// n0(x, y) = N0(x) Gamma_{V0}(y - Z0(x)).
struct InitialData {
  SpatialProfile N0{1.0, 0.0, 1, 0, 0.0};
  SpatialProfile Z0{0.0, 0.0, 1, 0, 0.0};
  double V0 = 1.0;
};

/// Substeps can be switched off individually for isolated tests.
struct SplitTerms {
  bool diffusion = true;
  bool reaction = true;
  bool reproduction = true;
};

struct SimParams {
  double A = 1.0;
  double gamma = 1.0;
  double dt = 1e-3;
  int jobs = 1;
  SplitTerms terms{};
};

/// Builds the sampled initial state, checking that min_x N0 > 0 and that
/// every initial Gaussian sits at least 6 standard deviations inside the
/// trait grid.
KineticState init_state(const TorusGrid& space, const TraitGrid& trait, const InitialData& init);

struct StepReport {
  double diffusion_mass_defect = 0.0;  ///< |mass after D - mass before D| / mass before
  double leaked = 0.0;                 ///< mass lost through trait boundaries this step
  double min_population = 0.0;
};

/// Largest admissible dt for the current state: min(0.1, 1 / (4 sup|r|)),
/// with sup|r| taken over the trait grid extent at time t.
double sim_dt_max(const KineticState& state, const Environment& env, double A);

/// One Lie-split step of the kinetic equation, in the order
/// diffusion -> selection/competition -> reproduction.
///
///  - Diffusion: periodic Crank-Nicolson per trait slice.
///  - Reaction: n <- n exp(dt r), r = 1 + A/2 - (y - y_opt(t + dt/2, x))^2 / 2 - N(x).
///  - Reproduction: exact relaxation of d_t n = gamma (N T(n/N) - n) with
///    T(n/N) frozen at the substep start.
class SimSolver {
 public:
  SimSolver(TorusGrid space, TraitGrid trait, SimParams params, Environment env);

  /// Advances `state` by dt (or by `dt_override` when positive, used for a
  /// shortened last step). Throws InvariantViolation on NaN, negativity or a
  /// population below kPopulationFloor; PreconditionError if dt exceeds
  /// sim_dt_max.
  StepReport step(KineticState& state, double dt_override = 0.0) const;

  const SimParams& params() const { return params_; }
  const Environment& environment() const { return env_; }
  const ReproductionKernel& kernel() const { return kernel_; }

 private:
  const PeriodicDiffusion& diffusion_for(double dt) const;

  TorusGrid space_;
  TraitGrid trait_;
  SimParams params_;
  Environment env_;
  ReproductionKernel kernel_;
  PeriodicDiffusion diffusion_;
  mutable std::vector<PeriodicDiffusion> short_diffusion_;
  mutable std::vector<ReproductionWorkspace> workspaces_;
  mutable std::vector<double> column_scratch_;
};

/// Convenience single step that builds a solver for the call.
KineticState sim_step(const KineticState& state, const SimParams& params, const Environment& env);

/// Moments of the kinetic state per spatial cell.
struct MacroSnapshot {
  double t = 0.0;
  std::vector<double> N;
  std::vector<double> Z;
  /// Raw fourth moment of the normalized profile; empty for KBM snapshots.
  std::vector<double> V;
};

MacroSnapshot kinetic_moments(const KineticState& state);

using StateObserver = std::function<void(const KineticState&)>;

struct SimTrajectory {
  std::vector<MacroSnapshot> snapshots;
  KineticState final_state;
  std::size_t steps = 0;
  double max_leak_rate = 0.0;          ///< leaked mass per unit time over total mass
  double max_diffusion_defect = 0.0;   ///< worst per-step relative mass change of diffusion
};

/// Steps from state0.t to t_end. A snapshot (moments plus observer call) is
/// taken at the start, every `snapshot_stride` steps, and at the end.
/// Invariant violations are rethrown with the failing time attached.
SimTrajectory run_sim(const KineticState& state0, const SimSolver& solver, double t_end,
                      std::size_t snapshot_stride, const StateObserver& observer = {});

}  // namespace kinmac
