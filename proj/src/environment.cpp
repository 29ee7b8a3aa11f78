#include "kinmac/environment.hpp"

#include <cmath>
#include <numbers>

#include "kinmac/errors.hpp"

namespace kinmac {

double SpatialProfile::operator()(std::array<double, 2> x, double period) const {
  if (amplitude == 0.0) return mean;
  const double arg =
      2.0 * std::numbers::pi * (wavenumber * x[0] + wavenumber_y * x[1]) / period + phase;
  return mean + amplitude * std::sin(arg);
}

double SpatialProfile::minimum() const { return mean - std::abs(amplitude); }
double SpatialProfile::maximum() const { return mean + std::abs(amplitude); }

std::string_view to_string(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::constant: return "constant";
    case EnvironmentKind::affine_in_t: return "affine-in-t";
    case EnvironmentKind::sinusoidal_in_x: return "sinusoidal-in-x";
    case EnvironmentKind::sinusoidal_plus_drift: return "sinusoidal-plus-drift";
  }
  return "constant";
}

EnvironmentKind environment_kind_from_string(std::string_view name) {
  if (name == "constant") return EnvironmentKind::constant;
  if (name == "affine-in-t") return EnvironmentKind::affine_in_t;
  if (name == "sinusoidal-in-x") return EnvironmentKind::sinusoidal_in_x;
  if (name == "sinusoidal-plus-drift") return EnvironmentKind::sinusoidal_plus_drift;
  throw PreconditionError("unknown environment kind '" + std::string(name) + "'");
}

Environment::Environment(EnvironmentKind kind, SpatialProfile profile, double drift,
                         double period)
    : kind_(kind), profile_(profile), drift_(drift), period_(period) {
  if (!std::isfinite(profile.mean) || !std::isfinite(profile.amplitude) ||
      !std::isfinite(profile.phase) || !std::isfinite(drift)) {
    throw PreconditionError("environment coefficients must be finite");
  }
  if (!(period > 0.0)) throw PreconditionError("environment period must be positive");
  if (profile.wavenumber < 0 || profile.wavenumber_y < 0) {
    throw PreconditionError("environment wavenumbers must be nonnegative integers");
  }
  const bool spatial = profile.amplitude != 0.0;
  const bool drifting = drift != 0.0;
  switch (kind) {
    case EnvironmentKind::constant:
      if (spatial || drifting) throw PreconditionError("constant environment needs amplitude = drift = 0");
      break;
    case EnvironmentKind::affine_in_t:
      if (spatial) throw PreconditionError("affine-in-t environment needs amplitude = 0");
      break;
    case EnvironmentKind::sinusoidal_in_x:
      if (drifting) throw PreconditionError("sinusoidal-in-x environment needs drift = 0");
      break;
    case EnvironmentKind::sinusoidal_plus_drift:
      break;
  }
}

Environment Environment::constant(double value, double period) {
  return Environment(EnvironmentKind::constant, SpatialProfile{value, 0.0, 1, 0, 0.0}, 0.0, period);
}

double Environment::sup_value(double horizon) const {
  return std::abs(profile_.mean) + std::abs(profile_.amplitude) + std::abs(drift_) * horizon;
}

double Environment::sup_space_derivative() const {
  const double k = std::hypot(profile_.wavenumber, profile_.wavenumber_y);
  return std::abs(profile_.amplitude) * 2.0 * std::numbers::pi * k / period_;
}

}  // namespace kinmac
