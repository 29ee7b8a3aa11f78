#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "kinmac/diffusion.hpp"
#include "kinmac/errors.hpp"
#include "kinmac/kbm_solver.hpp"

using namespace kinmac;

namespace {

const TorusGrid kSpace = make_torus_grid(1, 64, 1.0);

Environment wavy() {
  return Environment(EnvironmentKind::sinusoidal_in_x, SpatialProfile{0.0, 0.5, 1, 0, 0.0}, 0.0, 1.0);
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Closed-form homogeneous solution with y_opt = 0, Z(0) = c, N(0) = N0:
// Z = c exp(-A t) and 1/N solves the linear equation u' = -a(t) u + 1 with
// a(t) = 1 - Z(t)^2 / 2. The remaining integral is done by Simpson's rule.
double bernoulli_N(double N0, double c, double A, double t) {
  auto Phi = [&](double s) { return s - 0.25 * c * c * (1.0 - std::exp(-2.0 * A * s)) / A; };
  const int n = 20000;
  const double h = t / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::exp(Phi(i * h));
  }
  acc *= h / 3.0;
  return 1.0 / (std::exp(-Phi(t)) * (1.0 / N0 + acc));
}

// Method of lines for (N, Z) written with the gradient coupling term,
// advanced by classical RK4 with a small step.
void direct_nz_rk4(std::vector<double>& N, std::vector<double>& Z, const Environment& env, double A,
                   double t_end, double dt) {
  const TorusGrid& g = kSpace;
  auto rhs = [&](double t, const std::vector<double>& n, const std::vector<double>& z,
                 std::vector<double>& dn, std::vector<double>& dz) {
    const auto ln = periodic_laplacian(n, g);
    const auto lz = periodic_laplacian(z, g);
    const auto gd = periodic_gradient_dot(n, z, g);
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double y = env(t, g.position(i));
      dn[i] = ln[i] + (1.0 - 0.5 * (z[i] - y) * (z[i] - y) - n[i]) * n[i];
      dz[i] = lz[i] + 2.0 * gd[i] / n[i] - A * (z[i] - y);
    }
  };
  const std::size_t m = N.size();
  std::vector<double> k1n(m), k1z(m), k2n(m), k2z(m), k3n(m), k3z(m), k4n(m), k4z(m), tn(m), tz(m);
  const int steps = static_cast<int>(std::lround(t_end / dt));
  for (int s = 0; s < steps; ++s) {
    const double t = s * dt;
    rhs(t, N, Z, k1n, k1z);
    for (std::size_t i = 0; i < m; ++i) tn[i] = N[i] + 0.5 * dt * k1n[i], tz[i] = Z[i] + 0.5 * dt * k1z[i];
    rhs(t + 0.5 * dt, tn, tz, k2n, k2z);
    for (std::size_t i = 0; i < m; ++i) tn[i] = N[i] + 0.5 * dt * k2n[i], tz[i] = Z[i] + 0.5 * dt * k2z[i];
    rhs(t + 0.5 * dt, tn, tz, k3n, k3z);
    for (std::size_t i = 0; i < m; ++i) tn[i] = N[i] + dt * k3n[i], tz[i] = Z[i] + dt * k3z[i];
    rhs(t + dt, tn, tz, k4n, k4z);
    for (std::size_t i = 0; i < m; ++i) {
      N[i] += dt / 6.0 * (k1n[i] + 2.0 * k2n[i] + 2.0 * k3n[i] + k4n[i]);
      Z[i] += dt / 6.0 * (k1z[i] + 2.0 * k2z[i] + 2.0 * k3z[i] + k4z[i]);
    }
  }
}

}  // namespace

TEST_CASE("constant state at the optimum is a fixed point") {
  const double c = 0.37;
  KbmSolver solver(kSpace, Environment::constant(c), 1.0, 1e-3);
  MacroState m(kSpace, 0.0, std::vector<double>(64, 1.0), std::vector<double>(64, c));
  for (int k = 0; k < 100; ++k) {
    const std::vector<double> N = m.N, Z = m.Z();
    solver.step(m);
    CHECK(max_diff(m.N, N) <= 1e-12);
    CHECK(max_diff(m.Z(), Z) <= 1e-12);
  }
}

TEST_CASE("mean trait relaxes exponentially") {
  for (double A : {0.5, 1.0, 2.0}) {
    KbmSolver solver(kSpace, Environment::constant(0.0), A, 1e-3);
    InitialData init;
    init.Z0 = SpatialProfile{0.8, 0.0, 1, 0, 0.0};
    const KbmTrajectory traj = run_kbm(init_macro_state(kSpace, init), solver, 5.0, 1000);
    for (const auto& s : traj.snapshots) {
      for (double z : s.Z) CHECK(std::abs(z - 0.8 * std::exp(-A * s.t)) <= 1e-4);
    }
  }
}

TEST_CASE("homogeneous reference against the closed form") {
  const std::vector<double> times{0.5, 1.0, 2.5, 5.0};
  for (double A : {0.5, 2.0}) {
    const auto ref = homogeneous_reference(0.3, 1.2, Environment::constant(0.0), A, times);
    REQUIRE(ref.size() == times.size());
    for (const auto& p : ref) {
      CHECK(std::abs(p.Z - 1.2 * std::exp(-A * p.t)) <= 1e-9);
      CHECK(std::abs(p.N - bernoulli_N(0.3, 1.2, A, p.t)) <= 1e-9);
    }
  }
  // Unit displacement decays as exp(-A t).
  const auto z = homogeneous_reference(1.0, 1.5, Environment::constant(0.5), 2.0, {0.5});
  CHECK(std::abs(z[0].Z - 0.5 - std::exp(-1.0)) <= 1e-8);

  const auto still = homogeneous_reference(1.0, 0.5, Environment::constant(0.5), 1.0, {1.0, 3.0});
  for (const auto& p : still) {
    CHECK(std::abs(p.N - 1.0) <= 1e-12);
    CHECK(std::abs(p.Z - 0.5) <= 1e-12);
  }
  const auto late = homogeneous_reference(0.5, 1.0, Environment::constant(0.0), 1.0, {40.0});
  CHECK(std::abs(late[0].N - 1.0) <= 1e-8);

  CHECK_THROWS_AS(homogeneous_reference(1.0, 0.0, wavy(), 1.0, {1.0}), PreconditionError);
  CHECK_THROWS_AS(homogeneous_reference(1.0, 0.0, Environment::constant(0.0), 1.0, {2.0, 1.0}),
                  PreconditionError);
}

TEST_CASE("homogeneous run matches the ODE reference") {
  const Environment env = Environment::constant(0.2);
  KbmSolver solver(kSpace, env, 1.0, 1e-3);
  InitialData init;
  init.N0 = SpatialProfile{0.4, 0.0, 1, 0, 0.0};
  init.Z0 = SpatialProfile{1.1, 0.0, 1, 0, 0.0};
  const KbmTrajectory traj = run_kbm(init_macro_state(kSpace, init), solver, 5.0, 1000);
  const auto ref = homogeneous_reference(0.4, 1.1, env, 1.0, {5.0});
  for (double n : traj.final_state.N) CHECK(std::abs(n - ref[0].N) <= 1e-4);
  for (double z : traj.final_state.Z()) CHECK(std::abs(z - ref[0].Z) <= 1e-4);
}

TEST_CASE("trajectory bookkeeping and self-convergence") {
  InitialData init;
  init.N0 = SpatialProfile{1.0, 0.3, 1, 0, 0.0};
  const MacroState m0 = init_macro_state(kSpace, init);
  KbmSolver solver(kSpace, wavy(), 1.0, 1e-2);
  CHECK(run_kbm(m0, solver, 0.0, 1).snapshots.size() == 1);
  CHECK(run_kbm(m0, solver, 0.5, 1000).snapshots.size() == 2);

  std::vector<std::vector<double>> finals;
  for (double dt : {2e-2, 1e-2, 5e-3}) {
    KbmSolver s(kSpace, wavy(), 1.0, dt);
    const auto f = run_kbm(m0, s, 1.0, 1000).final_state;
    std::vector<double> both = f.N;
    const auto z = f.Z();
    both.insert(both.end(), z.begin(), z.end());
    finals.push_back(both);
  }
  const double ratio = max_diff(finals[0], finals[1]) / max_diff(finals[1], finals[2]);
  MESSAGE("self-convergence ratio " << ratio);
  CHECK(ratio >= 2.0);
}

TEST_CASE("perturbations grow at most exponentially") {
  InitialData init;
  init.N0 = SpatialProfile{1.0, 0.3, 1, 0, 0.0};
  MacroState a = init_macro_state(kSpace, init);
  MacroState b = a;
  for (std::size_t i = 0; i < b.N.size(); ++i) {
    b.N[i] += 1e-6 * std::cos(2.0 * M_PI * kSpace.center(static_cast<int>(i)));
    b.Y[i] += 1e-6;
  }
  KbmSolver solver(kSpace, wavy(), 1.0, 1e-3);
  for (int k = 1; k <= 2000; ++k) {
    solver.step(a);
    solver.step(b);
    if (k % 100 == 0) {
      const double d = std::max(max_diff(a.N, b.N), max_diff(a.Z(), b.Z()));
      CHECK(d <= 4.0 * std::exp(4.0 * a.t) * 1e-6);
    }
  }
}

TEST_CASE("recovered mean trait agrees with a direct discretization") {
  InitialData init;
  init.N0 = SpatialProfile{1.0, 0.4, 1, 0, 0.5};
  init.Z0 = SpatialProfile{0.1, 0.3, 2, 0, 0.0};
  const MacroState m0 = init_macro_state(kSpace, init);
  KbmSolver solver(kSpace, wavy(), 1.0, 1e-3);
  const MacroState f = run_kbm(m0, solver, 0.5, 1000).final_state;

  std::vector<double> N = m0.N, Z = m0.Z();
  direct_nz_rk4(N, Z, wavy(), 1.0, 0.5, 5e-5);
  CHECK(max_diff(f.Z(), Z) <= 1e-4);
  CHECK(max_diff(f.N, N) <= 1e-4);
}

TEST_CASE("preconditions and invariant checks") {
  CHECK_THROWS_AS(KbmSolver(kSpace, wavy(), 0.0, 1e-3), PreconditionError);
  CHECK_THROWS_AS(KbmSolver(kSpace, wavy(), 1.0, 0.0), PreconditionError);
  InitialData bad;
  bad.N0 = SpatialProfile{0.0, 0.0, 1, 0, 0.0};
  CHECK_THROWS_AS(init_macro_state(kSpace, bad), PreconditionError);

  KbmSolver coarse(kSpace, wavy(), 1.0, 0.5);
  MacroState m = init_macro_state(kSpace, InitialData{});
  CHECK_THROWS_AS(coarse.step(m), PreconditionError);

  // Just above the floor and far from the optimum: the first step drops below it.
  KbmSolver far(kSpace, Environment::constant(3.0), 1.0, 1e-3);
  MacroState sparse(kSpace, 0.0, std::vector<double>(64, 1.0000001e-12), std::vector<double>(64, 0.0));
  CHECK_THROWS_AS(far.step(sparse), InvariantViolation);

  MacroState nan_state(kSpace, 0.0, std::vector<double>(64, 1.0), std::vector<double>(64, 0.0));
  nan_state.Y[3] = std::nan("");
  KbmSolver solver(kSpace, wavy(), 1.0, 1e-3);
  CHECK_THROWS_AS(solver.step(nan_state), InvariantViolation);

  const MacroState a = kbm_step(init_macro_state(kSpace, InitialData{}), wavy(), 1.0, 1e-3);
  CHECK(a.t == doctest::Approx(1e-3));
}
