#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "kinmac/diffusion.hpp"

using namespace kinmac;

namespace {

// Crank-Nicolson amplification of the mode sin(2 pi k x / L) over one step.
double cn_factor(const TorusGrid& g, int k, double dt) {
  const double h = g.spacing();
  const double s = std::sin(M_PI * k * h / g.period());
  const double lambda = -4.0 * s * s / (h * h);
  return (1.0 + 0.5 * dt * lambda) / (1.0 - 0.5 * dt * lambda);
}

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("cyclic tridiagonal solve matches the dense product") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> scratch;
  for (int n : {4, 5, 17, 64}) {
    const double diag = 2.5, off = -0.75;
    const CyclicTridiagonal sys(n, diag, off);
    const std::size_t width = 3;
    std::vector<double> rhs(n * width);
    for (double& v : rhs) v = u(rng);
    std::vector<double> x = rhs;
    sys.solve(x, width, scratch);
    for (int i = 0; i < n; ++i) {
      const int l = (i + n - 1) % n, r = (i + 1) % n;
      for (std::size_t w = 0; w < width; ++w) {
        const double ax = off * x[l * width + w] + diag * x[i * width + w] + off * x[r * width + w];
        CHECK(ax == doctest::Approx(rhs[i * width + w]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("Fourier modes decay by the Crank-Nicolson factor") {
  const TorusGrid g = make_torus_grid(1, 64, 1.0);
  const double dt = 1e-3;
  const PeriodicDiffusion diff(g, dt);
  for (int k : {1, 3, 10}) {
    std::vector<double> u(64);
    for (int i = 0; i < 64; ++i) u[i] = std::sin(2.0 * M_PI * k * g.center(i));
    std::vector<double> v = u;
    diff.apply(v, 1);
    const double f = cn_factor(g, k, dt);
    for (int i = 0; i < 64; ++i) CHECK(std::abs(v[i] - f * u[i]) <= 1e-13);
  }
}

TEST_CASE("heat flow converges to the exact decay") {
  // Error at t = 0.05 against exp(-4 pi^2 t), halving dt and h together.
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    const int m = 32 << level;
    const double dt = 2e-3 / (1 << level);
    const TorusGrid g = make_torus_grid(1, m, 1.0);
    const PeriodicDiffusion diff(g, dt);
    std::vector<double> u(m);
    for (int i = 0; i < m; ++i) u[i] = std::cos(2.0 * M_PI * g.center(i));
    const int steps = static_cast<int>(std::lround(0.05 / dt));
    for (int s = 0; s < steps; ++s) diff.apply(u, 1);
    double err = 0.0;
    for (int i = 0; i < m; ++i) {
      err = std::max(err, std::abs(u[i] - std::exp(-4.0 * M_PI * M_PI * 0.05) *
                                              std::cos(2.0 * M_PI * g.center(i))));
    }
    if (level > 0) CHECK(prev / err > 3.5);
    prev = err;
  }
}

TEST_CASE("diffusion conserves mass and constants") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int dim : {1, 2}) {
    const TorusGrid g = make_torus_grid(dim, 32, 1.0);
    const PeriodicDiffusion diff(g, 5e-3);
    const std::size_t width = 4;
    std::vector<double> v(g.cell_count() * width);
    for (double& x : v) x = u(rng);
    const double before = total(v);
    diff.apply(v, width);
    CHECK(std::abs(total(v) - before) / before <= 1e-10);

    std::vector<double> c(g.cell_count(), 2.5);
    diff.apply(c, 1);
    for (double x : c) CHECK(x == doctest::Approx(2.5).epsilon(1e-14));
  }
}

TEST_CASE("rough nonnegative data stays nonnegative when dt <= h^2") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int dim : {1, 2}) {
    const TorusGrid g = make_torus_grid(dim, 32, 1.0);
    const PeriodicDiffusion diff(g, g.spacing() * g.spacing());
    std::vector<double> v(g.cell_count());
    for (double& x : v) x = u(rng) < 0.2 ? u(rng) : 0.0;
    for (int s = 0; s < 10; ++s) {
      diff.apply(v, 1);
      for (double x : v) REQUIRE(x >= 0.0);
    }
  }
}

TEST_CASE("ADI treats separable modes exactly") {
  const TorusGrid g = make_torus_grid(2, 32, 1.0);
  const double dt = 2e-3;
  const PeriodicDiffusion diff(g, dt);
  std::vector<double> u(g.cell_count());
  for (int iy = 0; iy < 32; ++iy) {
    for (int ix = 0; ix < 32; ++ix) {
      u[g.flat_index(ix, iy)] = std::sin(2.0 * M_PI * g.center(ix)) * std::cos(4.0 * M_PI * g.center(iy));
    }
  }
  std::vector<double> v = u;
  diff.apply(v, 1);
  const double f = cn_factor(g, 1, dt) * cn_factor(g, 2, dt);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(v[i] - f * u[i]) <= 1e-13);
}

TEST_CASE("independent fields do not mix") {
  const TorusGrid g = make_torus_grid(1, 16, 1.0);
  const PeriodicDiffusion diff(g, 1e-2);
  std::vector<double> single(16), pair(32);
  for (int i = 0; i < 16; ++i) {
    single[i] = std::sin(2.0 * M_PI * g.center(i)) + 0.1 * i;
    pair[2 * i] = single[i];
    pair[2 * i + 1] = -3.0;
  }
  diff.apply(single, 1);
  diff.apply(pair, 2);
  for (int i = 0; i < 16; ++i) {
    CHECK(pair[2 * i] == single[i]);
    CHECK(pair[2 * i + 1] == doctest::Approx(-3.0).epsilon(1e-14));
  }
}

TEST_CASE("discrete Laplacian and gradients") {
  const TorusGrid g = make_torus_grid(1, 64, 1.0);
  const double h = g.spacing();
  std::vector<double> s(64), c(64);
  for (int i = 0; i < 64; ++i) {
    s[i] = std::sin(2.0 * M_PI * g.center(i));
    c[i] = std::cos(2.0 * M_PI * g.center(i));
  }
  const auto lap = periodic_laplacian(s, g);
  const double sh = std::sin(M_PI * h);
  for (int i = 0; i < 64; ++i) CHECK(std::abs(lap[i] + 4.0 * sh * sh / (h * h) * s[i]) <= 1e-10);

  // grad sin . grad cos = -(2 pi)^2 sin cos, up to the centered-difference factor.
  const auto gd = periodic_gradient_dot(s, c, g);
  const double k = std::sin(2.0 * M_PI * h) / h;
  for (int i = 0; i < 64; ++i) CHECK(std::abs(gd[i] + k * k * s[i] * c[i]) <= 1e-10);

  const TorusGrid g2 = make_torus_grid(2, 16, 1.0);
  std::vector<double> f(g2.cell_count());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = g2.position(i);
    f[i] = std::sin(2.0 * M_PI * p[0]) + std::sin(2.0 * M_PI * p[1]);
  }
  const auto lap2 = periodic_laplacian(f, g2);
  const double h2 = g2.spacing();
  const double s2 = std::sin(M_PI * h2);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(lap2[i] + 4.0 * s2 * s2 / (h2 * h2) * f[i]) <= 1e-10);
}
