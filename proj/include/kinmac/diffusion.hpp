#pragma once

#include <span>
#include <vector>

#include "kinmac/grids.hpp"

namespace kinmac {

/// Constant-coefficient cyclic tridiagonal system
/// off * x_{i-1} + diag * x_i + off * x_{i+1} = rhs_i (indices mod n),
/// solved by Thomas elimination plus a Sherman-Morrison correction.
/// Unknowns may be rows of `width` values that share the same matrix.
class CyclicTridiagonal {
 public:
  CyclicTridiagonal(int n, double diag, double off);

  /// Solves in place. `rows` holds n rows of `width` values each, row i at
  /// rows[i * width]. `scratch` is resized as needed.
  void solve(std::span<double> rows, std::size_t width, std::vector<double>& scratch) const;

  int size() const { return n_; }

 private:
  int n_;
  double off_;
  double gamma_;
  std::vector<double> cprime_;
  std::vector<double> inv_denom_;
  std::vector<double> z_;
  double z_factor_;
};

/// Periodic heat flow d_t u = Laplacian u on a TorusGrid over one step dt.
///
/// d = 1: Crank-Nicolson. d = 2: Peaceman-Rachford ADI, whose two half steps
/// are each a Crank-Nicolson-type split. Both conserve sum_i u_i exactly in
/// exact arithmetic.
///
/// Fields are stored as [cell][width]: `width` independent fields (for
/// example one per trait cell) that are all diffused at once.
class PeriodicDiffusion {
 public:
  PeriodicDiffusion(TorusGrid grid, double dt);

  void apply(std::span<double> data, std::size_t width) const;

  const TorusGrid& grid() const { return grid_; }
  double dt() const { return dt_; }

 private:
  void explicit_half(std::span<const double> in, std::span<double> out, std::size_t width,
                     int axis) const;
  void implicit_half(std::span<double> data, std::size_t width, int axis) const;

  TorusGrid grid_;
  double dt_;
  double half_ratio_;  // (dt / 2) / h^2
  CyclicTridiagonal system_;
  mutable std::vector<double> buffer_;
  mutable std::vector<double> line_;
  mutable std::vector<double> scratch_;
};

/// Five- or three-point periodic Laplacian of a single scalar field.
std::vector<double> periodic_laplacian(std::span<const double> field, const TorusGrid& grid);

/// Centered-difference gradient dot product grad(a) . grad(b).
std::vector<double> periodic_gradient_dot(std::span<const double> a, std::span<const double> b,
                                          const TorusGrid& grid);

}  // namespace kinmac
