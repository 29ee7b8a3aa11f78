#include "kinmac/kbm_solver.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "kinmac/errors.hpp"

namespace kinmac {

MacroState::MacroState(TorusGrid s, double time)
    : space(s), t(time), N(s.cell_count(), 0.0), Y(s.cell_count(), 0.0) {}

MacroState::MacroState(TorusGrid s, double time, std::vector<double> n, std::vector<double> z_mean)
    : space(s), t(time), N(std::move(n)), Y(std::move(z_mean)) {
  if (N.size() != space.cell_count() || Y.size() != space.cell_count()) {
    throw PreconditionError("macro state: field size does not match grid");
  }
  for (std::size_t c = 0; c < N.size(); ++c) Y[c] *= N[c];
}

std::vector<double> MacroState::Z() const {
  std::vector<double> z(N.size());
  for (std::size_t c = 0; c < N.size(); ++c) z[c] = Y[c] / N[c];
  return z;
}

MacroState init_macro_state(const TorusGrid& space, const InitialData& init) {
  if (!(init.N0.minimum() > 0.0)) {
    throw PreconditionError("Assumption (ii) violated: min N0 must be positive");
  }
  std::vector<double> n(space.cell_count()), z(space.cell_count());
  for (std::size_t c = 0; c < n.size(); ++c) {
    n[c] = init.N0(space.position(c), space.period());
    z[c] = init.Z0(space.position(c), space.period());
  }
  return MacroState(space, 0.0, std::move(n), std::move(z));
}

KbmSolver::KbmSolver(TorusGrid space, Environment env, double A, double dt)
    : space_(space), env_(env), A_(A), dt_(dt), diffusion_(space, 0.5 * dt) {
  if (!(A > 0.0)) throw PreconditionError("A must be positive");
  if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
  if (env.period() != space.period()) {
    throw PreconditionError("environment period differs from torus period");
  }
}

const PeriodicDiffusion& KbmSolver::diffusion_for(double dt) const {
  if (std::abs(dt - diffusion_.dt()) <= 1e-12 * diffusion_.dt()) return diffusion_;
  if (short_diffusion_.empty() || short_diffusion_.front().dt() != dt) {
    short_diffusion_.clear();
    short_diffusion_.emplace_back(space_, dt);
  }
  return short_diffusion_.front();
}

double KbmSolver::dt_max(const MacroState& m) const {
  double sup_rate = A_;
  for (std::size_t c = 0; c < m.N.size(); ++c) {
    const double gap = m.Y[c] / m.N[c] - env_(m.t, space_.position(c));
    sup_rate = std::max(sup_rate, 1.0 + 0.5 * gap * gap + 2.0 * m.N[c] + std::abs(gap) + A_);
  }
  return std::min(0.1, 1.0 / (4.0 * sup_rate));
}

namespace {

struct Rates {
  double dN;
  double dY;
};

Rates reaction(double N, double Y, double yopt, double A) {
  const double dev = Y - yopt * N;
  const double g = 1.0 - dev * dev / (2.0 * N * N) - N;
  return {g * N, g * Y - A * dev};
}

}  // namespace

void KbmSolver::step(MacroState& m, double dt_override) const {
  if (!(m.space == space_)) throw PreconditionError("kbm step: grid mismatch");
  const double dt = dt_override > 0.0 ? dt_override : dt_;
  const double limit = dt_max(m);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << dt << " exceeds the stability bound " << limit;
    throw PreconditionError(msg.str());
  }
  const double t0 = m.t;
  const auto& diffusion = diffusion_for(0.5 * dt);
  diffusion.apply(m.N, 1);
  diffusion.apply(m.Y, 1);

  for (std::size_t c = 0; c < m.N.size(); ++c) {
    const auto pos = space_.position(c);
    const double N = m.N[c], Y = m.Y[c];
    if (!(N >= kPopulationFloor)) {
      std::ostringstream msg;
      msg << "population N = " << N << " below floor in cell " << c << " at t = " << t0;
      throw InvariantViolation(msg.str());
    }
    const Rates k1 = reaction(N, Y, env_(t0, pos), A_);
    const double N1 = N + dt * k1.dN, Y1 = Y + dt * k1.dY;
    if (!(N1 >= kPopulationFloor)) {
      throw InvariantViolation("population fell below floor inside the reaction stage");
    }
    const Rates k2 = reaction(N1, Y1, env_(t0 + dt, pos), A_);
    m.N[c] = N + 0.5 * dt * (k1.dN + k2.dN);
    m.Y[c] = Y + 0.5 * dt * (k1.dY + k2.dY);
  }
  for (std::size_t c = 0; c < m.N.size(); ++c) {
    if (!std::isfinite(m.N[c]) || !std::isfinite(m.Y[c]) || !(m.N[c] >= kPopulationFloor)) {
      std::ostringstream msg;
      msg << "macro state invalid in cell " << c << " at t = " << t0 + dt << " (N = " << m.N[c]
          << ", Y = " << m.Y[c] << ")";
      throw InvariantViolation(msg.str());
    }
  }
  diffusion.apply(m.N, 1);
  diffusion.apply(m.Y, 1);
  m.t = t0 + dt;
}

MacroState kbm_step(const MacroState& m, const Environment& env, double A, double dt) {
  KbmSolver solver(m.space, env, A, dt);
  MacroState next = m;
  solver.step(next);
  return next;
}

namespace {

MacroSnapshot macro_snapshot(const MacroState& m) {
  MacroSnapshot s;
  s.t = m.t;
  s.N = m.N;
  s.Z = m.Z();
  return s;
}

}  // namespace

KbmTrajectory run_kbm(const MacroState& m0, const KbmSolver& solver, double t_end,
                      std::size_t snapshot_stride) {
  if (!(t_end >= m0.t)) throw PreconditionError("run_kbm: t_end precedes the initial time");
  const double dt = solver.dt();
  const double t0 = m0.t;
  const auto steps = static_cast<std::size_t>(std::max(0.0, std::ceil((t_end - t0) / dt - 1e-9)));
  const std::size_t stride = std::max<std::size_t>(snapshot_stride, 1);

  KbmTrajectory traj{{}, m0, 0};
  MacroState& m = traj.final_state;
  traj.snapshots.push_back(macro_snapshot(m));
  for (std::size_t k = 1; k <= steps; ++k) {
    const double target = k == steps ? t_end : t0 + static_cast<double>(k) * dt;
    const double step_dt = target - m.t;
    try {
      solver.step(m, std::abs(step_dt - dt) <= 1e-12 * dt ? 0.0 : step_dt);
    } catch (const InvariantViolation& e) {
      std::ostringstream msg;
      msg << "run aborted at step " << k << " (t = " << m.t << "): " << e.what();
      throw InvariantViolation(msg.str());
    }
    m.t = target;
    traj.steps = k;
    if (k % stride == 0 || k == steps) traj.snapshots.push_back(macro_snapshot(m));
  }
  return traj;
}

std::vector<HomogeneousPoint> homogeneous_reference(double N0, double Z0, const Environment& env,
                                                    double A, const std::vector<double>& times) {
  namespace odeint = boost::numeric::odeint;
  if (!env.is_homogeneous()) {
    throw PreconditionError("homogeneous_reference: environment varies in space");
  }
  if (!(N0 > 0.0) || !(A > 0.0)) throw PreconditionError("homogeneous_reference: need N0 > 0, A > 0");
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0)) {
    throw PreconditionError("homogeneous_reference: output times must be ascending and >= 0");
  }
  using State = std::array<double, 2>;
  const std::array<double, 2> origin{0.0, 0.0};
  auto rhs = [&](const State& u, State& du, double t) {
    const double gap = u[1] - env(t, origin);
    du[0] = (1.0 - 0.5 * gap * gap - u[0]) * u[0];
    du[1] = -A * gap;
  };
  auto stepper = odeint::make_controlled(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
  State u{N0, Z0};
  std::vector<HomogeneousPoint> out;
  out.reserve(times.size());
  double t = 0.0;
  for (double target : times) {
    if (target > t) {
      odeint::integrate_adaptive(stepper, rhs, u, t, target, std::min(1e-3, target - t));
      t = target;
    }
    out.push_back({target, u[0], u[1]});
  }
  return out;
}

}  // namespace kinmac
