#include "kinmac/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "kinmac/errors.hpp"

namespace kinmac {

CyclicTridiagonal::CyclicTridiagonal(int n, double diag, double off)
    : n_(n), off_(off), gamma_(-diag) {
  if (n < 3) throw PreconditionError("cyclic tridiagonal system needs n >= 3");
  // Modified matrix of the Sherman-Morrison splitting A = B + u v^T with
  // u = (gamma, 0, ..., 0, off), v = (1, 0, ..., 0, off / gamma).
  std::vector<double> d(static_cast<std::size_t>(n), diag);
  d.front() = diag - gamma_;
  d.back() = diag - off * off / gamma_;

  cprime_.resize(static_cast<std::size_t>(n));
  inv_denom_.resize(static_cast<std::size_t>(n));
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double denom = d[static_cast<std::size_t>(i)] - (i > 0 ? off * prev : 0.0);
    inv_denom_[static_cast<std::size_t>(i)] = 1.0 / denom;
    prev = off / denom;
    cprime_[static_cast<std::size_t>(i)] = prev;
  }

  z_.assign(static_cast<std::size_t>(n), 0.0);
  z_.front() = gamma_;
  z_.back() = off;
  z_[0] *= inv_denom_[0];
  for (int i = 1; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    z_[k] = (z_[k] - off * z_[k - 1]) * inv_denom_[k];
  }
  for (int i = n - 2; i >= 0; --i) {
    const auto k = static_cast<std::size_t>(i);
    z_[k] -= cprime_[k] * z_[k + 1];
  }
  z_factor_ = 1.0 + z_.front() + (off / gamma_) * z_.back();
}

void CyclicTridiagonal::solve(std::span<double> rows, std::size_t width,
                              std::vector<double>& scratch) const {
  const auto n = static_cast<std::size_t>(n_);
  auto row = [&](std::size_t i) { return rows.subspan(i * width, width); };

  {
    auto r0 = row(0);
    for (double& v : r0) v *= inv_denom_[0];
  }
  for (std::size_t i = 1; i < n; ++i) {
    auto cur = row(i);
    auto prev = row(i - 1);
    const double inv = inv_denom_[i];
    for (std::size_t w = 0; w < width; ++w) cur[w] = (cur[w] - off_ * prev[w]) * inv;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    auto cur = row(i);
    auto next = row(i + 1);
    const double c = cprime_[i];
    for (std::size_t w = 0; w < width; ++w) cur[w] -= c * next[w];
  }

  scratch.resize(width);
  auto first = row(0);
  auto last = row(n - 1);
  const double ratio = off_ / gamma_;
  for (std::size_t w = 0; w < width; ++w) scratch[w] = (first[w] + ratio * last[w]) / z_factor_;
  for (std::size_t i = 0; i < n; ++i) {
    auto cur = row(i);
    const double zi = z_[i];
    for (std::size_t w = 0; w < width; ++w) cur[w] -= scratch[w] * zi;
  }
}

PeriodicDiffusion::PeriodicDiffusion(TorusGrid grid, double dt)
    : grid_(grid),
      dt_(dt),
      half_ratio_(0.5 * dt / (grid.spacing() * grid.spacing())),
      system_(grid.points_per_dim(), 1.0 + 2.0 * half_ratio_, -half_ratio_) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("diffusion dt must be positive");
}

void PeriodicDiffusion::explicit_half(std::span<const double> in, std::span<double> out,
                                      std::size_t width, int axis) const {
  const int m = grid_.points_per_dim();
  const std::size_t cells = grid_.cell_count();
  for (std::size_t c = 0; c < cells; ++c) {
    int ix = 0, iy = 0;
    if (grid_.dim() == 1) {
      ix = static_cast<int>(c);
    } else {
      ix = static_cast<int>(c % static_cast<std::size_t>(m));
      iy = static_cast<int>(c / static_cast<std::size_t>(m));
    }
    const std::size_t lo = axis == 0 ? grid_.flat_index(ix - 1, iy) : grid_.flat_index(ix, iy - 1);
    const std::size_t hi = axis == 0 ? grid_.flat_index(ix + 1, iy) : grid_.flat_index(ix, iy + 1);
    const double* u = in.data() + c * width;
    const double* ul = in.data() + lo * width;
    const double* uh = in.data() + hi * width;
    double* o = out.data() + c * width;
    for (std::size_t w = 0; w < width; ++w) {
      o[w] = u[w] + half_ratio_ * ((ul[w] - u[w]) + (uh[w] - u[w]));
    }
  }
}

void PeriodicDiffusion::implicit_half(std::span<double> data, std::size_t width, int axis) const {
  const auto m = static_cast<std::size_t>(grid_.points_per_dim());
  if (grid_.dim() == 1 || axis == 0) {
    const std::size_t lines = grid_.dim() == 1 ? 1 : m;
    for (std::size_t l = 0; l < lines; ++l) {
      system_.solve(data.subspan(l * m * width, m * width), width, scratch_);
    }
    return;
  }
  line_.resize(m * width);
  for (std::size_t ix = 0; ix < m; ++ix) {
    for (std::size_t iy = 0; iy < m; ++iy) {
      std::copy_n(data.data() + (iy * m + ix) * width, width, line_.data() + iy * width);
    }
    system_.solve(line_, width, scratch_);
    for (std::size_t iy = 0; iy < m; ++iy) {
      std::copy_n(line_.data() + iy * width, width, data.data() + (iy * m + ix) * width);
    }
  }
}

void PeriodicDiffusion::apply(std::span<double> data, std::size_t width) const {
  if (data.size() != grid_.cell_count() * width) {
    throw PreconditionError("diffusion: field size does not match grid");
  }
  buffer_.resize(data.size());
  if (grid_.dim() == 1) {
    explicit_half(data, buffer_, width, 0);
    implicit_half(buffer_, width, 0);
    std::copy(buffer_.begin(), buffer_.end(), data.begin());
    return;
  }
  explicit_half(data, buffer_, width, 1);
  implicit_half(buffer_, width, 0);
  explicit_half(buffer_, data, width, 0);
  implicit_half(data, width, 1);
}

namespace {

template <typename Fn>
void for_each_cell(const TorusGrid& grid, Fn&& fn) {
  const int m = grid.points_per_dim();
  if (grid.dim() == 1) {
    for (int ix = 0; ix < m; ++ix) fn(static_cast<std::size_t>(ix), ix, 0);
    return;
  }
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) fn(grid.flat_index(ix, iy), ix, iy);
  }
}

}  // namespace

std::vector<double> periodic_laplacian(std::span<const double> field, const TorusGrid& grid) {
  if (field.size() != grid.cell_count()) throw PreconditionError("laplacian: size mismatch");
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  std::vector<double> out(field.size());
  for_each_cell(grid, [&](std::size_t c, int ix, int iy) {
    double acc = field[grid.flat_index(ix - 1, iy)] + field[grid.flat_index(ix + 1, iy)] - 2.0 * field[c];
    if (grid.dim() == 2) {
      acc += field[grid.flat_index(ix, iy - 1)] + field[grid.flat_index(ix, iy + 1)] - 2.0 * field[c];
    }
    out[c] = acc * inv_h2;
  });
  return out;
}

std::vector<double> periodic_gradient_dot(std::span<const double> a, std::span<const double> b,
                                          const TorusGrid& grid) {
  if (a.size() != grid.cell_count() || b.size() != grid.cell_count()) {
    throw PreconditionError("gradient: size mismatch");
  }
  const double inv_2h = 0.5 / grid.spacing();
  std::vector<double> out(a.size());
  for_each_cell(grid, [&](std::size_t c, int ix, int iy) {
    const double ax = (a[grid.flat_index(ix + 1, iy)] - a[grid.flat_index(ix - 1, iy)]) * inv_2h;
    const double bx = (b[grid.flat_index(ix + 1, iy)] - b[grid.flat_index(ix - 1, iy)]) * inv_2h;
    double acc = ax * bx;
    if (grid.dim() == 2) {
      const double ay = (a[grid.flat_index(ix, iy + 1)] - a[grid.flat_index(ix, iy - 1)]) * inv_2h;
      const double by = (b[grid.flat_index(ix, iy + 1)] - b[grid.flat_index(ix, iy - 1)]) * inv_2h;
      acc += ay * by;
    }
    out[c] = acc;
  });
  return out;
}

}  // namespace kinmac
