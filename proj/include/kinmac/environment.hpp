#pragma once

#include <array>
#include <string>
#include <string_view>

namespace kinmac {

/// Smooth periodic profile on the torus:
/// mean + amplitude * sin(2 pi (k_x x + k_y y) / L + phase).
/// Integer wavenumbers keep it periodic; amplitude 0 gives a constant.
struct SpatialProfile {
  double mean = 0.0;
  double amplitude = 0.0;
  int wavenumber = 1;
  int wavenumber_y = 0;
  double phase = 0.0;

  double operator()(std::array<double, 2> x, double period) const;
  /// Smallest value attained on the torus.
  double minimum() const;
  double maximum() const;

  bool operator==(const SpatialProfile&) const = default;
};

enum class EnvironmentKind { constant, affine_in_t, sinusoidal_in_x, sinusoidal_plus_drift };

std::string_view to_string(EnvironmentKind kind);
EnvironmentKind environment_kind_from_string(std::string_view name);

/// Optimal trait y_opt(t, x) = profile(x) + drift * t.
class Environment {
 public:
  Environment(EnvironmentKind kind, SpatialProfile profile, double drift, double period);

  static Environment constant(double value, double period = 1.0);

  double operator()(double t, std::array<double, 2> x) const {
    return profile_(x, period_) + drift_ * t;
  }

  EnvironmentKind kind() const { return kind_; }
  const SpatialProfile& profile() const { return profile_; }
  double drift() const { return drift_; }
  double period() const { return period_; }
  bool is_homogeneous() const { return profile_.amplitude == 0.0; }

  /// Declared bounds of y_opt and its derivatives on [0, horizon] x torus.
  double sup_value(double horizon) const;
  double sup_time_derivative() const { return std::abs(drift_); }
  double sup_space_derivative() const;

 private:
  EnvironmentKind kind_;
  SpatialProfile profile_;
  double drift_;
  double period_;
};

}  // namespace kinmac
