#include "kinmac/sim_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kinmac/errors.hpp"
#include "kinmac/measures.hpp"
#include "kinmac/parallel.hpp"

namespace kinmac {

KineticState::KineticState(TorusGrid s, TraitGrid y, double time)
    : space(s), trait(y), t(time), n(s.cell_count() * static_cast<std::size_t>(y.points()), 0.0) {}

std::span<double> KineticState::column(std::size_t cell) {
  const auto m = static_cast<std::size_t>(trait.points());
  return std::span<double>(n).subspan(cell * m, m);
}

std::span<const double> KineticState::column(std::size_t cell) const {
  const auto m = static_cast<std::size_t>(trait.points());
  return std::span<const double>(n).subspan(cell * m, m);
}

double KineticState::total_mass() const {
  double acc = 0.0;
  for (std::size_t c = 0; c < space.cell_count(); ++c) acc += integrate(column(c), trait);
  return acc * std::pow(space.spacing(), space.dim());
}

KineticState init_state(const TorusGrid& space, const TraitGrid& trait, const InitialData& init) {
  if (!(init.V0 > 0.0) || !std::isfinite(init.V0)) {
    throw PreconditionError("initial trait variance V0 must be positive");
  }
  if (!(init.N0.minimum() > 0.0)) {
    std::ostringstream msg;
    msg << "Assumption (ii) violated: min N0 = " << std::max(0.0, init.N0.minimum())
        << " (initial population must be positive everywhere)";
    throw PreconditionError(msg.str());
  }
  const double margin = 6.0 * std::sqrt(init.V0);
  if (init.Z0.minimum() - margin < trait.y_min() || init.Z0.maximum() + margin > trait.y_max()) {
    std::ostringstream msg;
    msg << "initial mean trait range [" << init.Z0.minimum() << ", " << init.Z0.maximum()
        << "] is not 6 standard deviations inside the trait grid [" << trait.y_min() << ", "
        << trait.y_max() << "]";
    throw PreconditionError(msg.str());
  }
  KineticState state(space, trait, 0.0);
  for (std::size_t c = 0; c < space.cell_count(); ++c) {
    const auto pos = space.position(c);
    const double N0 = init.N0(pos, space.period());
    const double Z0 = init.Z0(pos, space.period());
    auto col = state.column(c);
    for (int j = 0; j < trait.points(); ++j) {
      col[static_cast<std::size_t>(j)] = N0 * gaussian_density(trait.center(j) - Z0, init.V0);
    }
  }
  return state;
}

double sim_dt_max(const KineticState& state, const Environment& env, double A) {
  double sup_r = 0.0;
  for (std::size_t c = 0; c < state.space.cell_count(); ++c) {
    const double N = integrate(state.column(c), state.trait);
    const double yopt = env(state.t, state.space.position(c));
    const double far = std::max(std::abs(state.trait.y_min() - yopt),
                                std::abs(state.trait.y_max() - yopt));
    const double r_top = 1.0 + 0.5 * A - N;
    const double r_bottom = r_top - 0.5 * far * far;
    sup_r = std::max({sup_r, std::abs(r_top), std::abs(r_bottom)});
  }
  return sup_r > 0.0 ? std::min(0.1, 1.0 / (4.0 * sup_r)) : 0.1;
}

SimSolver::SimSolver(TorusGrid space, TraitGrid trait, SimParams params, Environment env)
    : space_(space),
      trait_(trait),
      params_(params),
      env_(env),
      kernel_(params.A, trait),
      diffusion_(space, params.dt) {
  if (!(params.A > 0.0)) throw PreconditionError("A must be positive");
  if (!(params.dt > 0.0)) throw PreconditionError("dt must be positive");
  if (params.terms.reproduction && !(params.gamma > 0.0)) {
    throw PreconditionError("gamma must be positive");
  }
  if (params.gamma < 0.0) throw PreconditionError("gamma must be nonnegative");
  if (std::abs(env.period() - space.period()) > 0.0) {
    throw PreconditionError("environment period differs from torus period");
  }
  const auto jobs = static_cast<std::size_t>(std::max(1, params.jobs));
  workspaces_.resize(jobs);
  column_scratch_.resize(jobs * 2 * static_cast<std::size_t>(trait.points()));
}

const PeriodicDiffusion& SimSolver::diffusion_for(double dt) const {
  if (std::abs(dt - params_.dt) <= 1e-12 * params_.dt) return diffusion_;
  if (short_diffusion_.empty() || short_diffusion_.front().dt() != dt) {
    short_diffusion_.clear();
    short_diffusion_.emplace_back(space_, dt);
  }
  return short_diffusion_.front();
}

StepReport SimSolver::step(KineticState& state, double dt_override) const {
  if (!(state.space == space_) || !(state.trait == trait_)) {
    throw PreconditionError("sim step: state grids differ from solver grids");
  }
  const double dt = dt_override > 0.0 ? dt_override : params_.dt;
  const double limit = sim_dt_max(state, env_, params_.A);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << dt << " exceeds the stability bound " << limit;
    throw PreconditionError(msg.str());
  }

  const std::size_t cells = space_.cell_count();
  const auto m = static_cast<std::size_t>(trait_.points());
  const double h = trait_.spacing();
  const double t0 = state.t;
  StepReport report;

  if (params_.terms.diffusion) {
    double before = 0.0;
    for (double v : state.n) before += v;
    diffusion_for(dt).apply(state.n, m);
    double after = 0.0;
    for (double v : state.n) after += v;
    report.diffusion_mass_defect = before > 0.0 ? std::abs(after - before) / before : 0.0;
  }

  if (params_.terms.reaction) {
    const double t_mid = t0 + 0.5 * dt;
    const double base = 1.0 + 0.5 * params_.A;
    parallel_for(cells, params_.jobs, [&](std::size_t begin, std::size_t end) {
      for (std::size_t c = begin; c < end; ++c) {
        auto col = state.column(c);
        const double N = integrate(col, trait_);
        const double yopt = env_(t_mid, space_.position(c));
        for (std::size_t j = 0; j < m; ++j) {
          const double d = trait_.center(static_cast<int>(j)) - yopt;
          col[j] *= std::exp(dt * (base - 0.5 * d * d - N));
        }
      }
    });
  }

  std::vector<double> leaks(cells, 0.0);
  if (params_.terms.reproduction) {
    const double keep = std::exp(-params_.gamma * dt);
    const double relax = -std::expm1(-params_.gamma * dt);
    const std::size_t chunk = (cells + static_cast<std::size_t>(std::max(params_.jobs, 1)) - 1) /
                              static_cast<std::size_t>(std::max(params_.jobs, 1));
    parallel_for(cells, params_.jobs, [&](std::size_t begin, std::size_t end) {
      const std::size_t job = chunk > 0 ? begin / chunk : 0;
      auto& ws = workspaces_[job];
      std::span<double> profile(column_scratch_.data() + job * 2 * m, m);
      std::span<double> offspring(column_scratch_.data() + job * 2 * m + m, m);
      for (std::size_t c = begin; c < end; ++c) {
        auto col = state.column(c);
        const double N = integrate(col, trait_);
        if (!(N >= kPopulationFloor)) continue;  // reported by the invariant scan below
        for (std::size_t j = 0; j < m; ++j) profile[j] = col[j] / N;
        apply_T_into(profile, kernel_, offspring, ws);
        double offspring_mass = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          col[j] = keep * col[j] + relax * N * offspring[j];
          offspring_mass += offspring[j];
        }
        leaks[c] = relax * N * (1.0 - h * offspring_mass);
      }
    });
  }

  report.min_population = INFINITY;
  for (std::size_t c = 0; c < cells; ++c) {
    const auto col = state.column(c);
    for (double v : col) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "kinetic density invalid (" << v << ") in cell " << c << " at t = " << t0 + dt;
        throw InvariantViolation(msg.str());
      }
    }
    const double N = integrate(col, trait_);
    report.min_population = std::min(report.min_population, N);
    if (N < kPopulationFloor) {
      std::ostringstream msg;
      msg << "population N = " << N << " below floor in cell " << c << " at t = " << t0 + dt;
      throw InvariantViolation(msg.str());
    }
    report.leaked += leaks[c];
  }
  report.leaked *= std::pow(space_.spacing(), space_.dim());
  state.leaked_mass += report.leaked;
  state.t = t0 + dt;
  return report;
}

KineticState sim_step(const KineticState& state, const SimParams& params, const Environment& env) {
  SimSolver solver(state.space, state.trait, params, env);
  KineticState next = state;
  solver.step(next);
  return next;
}

MacroSnapshot kinetic_moments(const KineticState& state) {
  const std::size_t cells = state.space.cell_count();
  MacroSnapshot out;
  out.t = state.t;
  out.N.resize(cells);
  out.Z.resize(cells);
  out.V.resize(cells);
  const double h = state.trait.spacing();
  for (std::size_t c = 0; c < cells; ++c) {
    const auto col = state.column(c);
    double mass = 0.0, first = 0.0, fourth = 0.0;
    for (int j = 0; j < state.trait.points(); ++j) {
      const double y = state.trait.center(j);
      const double v = col[static_cast<std::size_t>(j)];
      mass += v;
      first += y * v;
      fourth += (y * y) * (y * y) * v;
    }
    const double N = h * mass;
    if (!(N >= kPopulationFloor)) {
      throw InvariantViolation("kinetic_moments: vanishing population in cell " + std::to_string(c));
    }
    out.N[c] = N;
    out.Z[c] = first / mass;
    out.V[c] = fourth / mass;
  }
  return out;
}

SimTrajectory run_sim(const KineticState& state0, const SimSolver& solver, double t_end,
                      std::size_t snapshot_stride, const StateObserver& observer) {
  if (!(t_end >= state0.t)) throw PreconditionError("run_sim: t_end precedes the initial time");
  const double dt = solver.params().dt;
  const double t0 = state0.t;
  const auto steps = static_cast<std::size_t>(std::max(0.0, std::ceil((t_end - t0) / dt - 1e-9)));
  const std::size_t stride = std::max<std::size_t>(snapshot_stride, 1);

  SimTrajectory traj{{}, state0, 0, 0.0, 0.0};
  KineticState& state = traj.final_state;
  auto snapshot = [&] {
    traj.snapshots.push_back(kinetic_moments(state));
    if (observer) observer(state);
  };
  snapshot();
  for (std::size_t k = 1; k <= steps; ++k) {
    const double target = k == steps ? t_end : t0 + static_cast<double>(k) * dt;
    const double step_dt = target - state.t;
    StepReport report;
    try {
      report = solver.step(state, std::abs(step_dt - dt) <= 1e-12 * dt ? 0.0 : step_dt);
    } catch (const InvariantViolation& e) {
      std::ostringstream msg;
      msg << "run aborted at step " << k << " (t = " << state.t << "): " << e.what();
      throw InvariantViolation(msg.str());
    }
    state.t = target;
    traj.steps = k;
    const double mass = state.total_mass();
    if (mass > 0.0) traj.max_leak_rate = std::max(traj.max_leak_rate, report.leaked / (step_dt * mass));
    traj.max_diffusion_defect = std::max(traj.max_diffusion_defect, report.diffusion_mass_defect);
    if (k % stride == 0 || k == steps) snapshot();
  }
  return traj;
}

}  // namespace kinmac
