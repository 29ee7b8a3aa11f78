#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kinmac/environment.hpp"
#include "kinmac/grids.hpp"
#include "kinmac/sim_solver.hpp"

namespace kinmac {

inline constexpr std::string_view kFormatVersion = "kinmac-output/1";

struct EnvironmentSpec {
  EnvironmentKind kind = EnvironmentKind::constant;
  SpatialProfile profile{};
  double drift = 0.0;

  bool operator==(const EnvironmentSpec&) const = default;
};

/// Every parameter of one run. Produced by parse_config, which applies the
/// documented defaults and validates all positivity constraints.
struct RunConfig {
  // physical
  double A = 1.0;
  std::optional<double> gamma;
  std::vector<double> gamma_list;
  EnvironmentSpec env{};
  SpatialProfile N0{1.0, 0.0, 1, 0, 0.0};
  SpatialProfile Z0{0.0, 0.0, 1, 0, 0.0};
  double V0 = 1.0;  ///< "auto" (the default) resolves to A

  // numerical
  int dim = 1;
  int points_x = 64;
  double period = 1.0;
  double trait_min = -8.0;  ///< "auto" resolves at parse time, see make_trait_grid
  double trait_max = 8.0;
  int points_y = 256;
  double dt = 1e-3;
  double t_end = 5.0;
  double snapshot_interval = 0.01;
  std::uint64_t seed = 0;
  double holder_theta = 0.5;
  std::optional<double> planted_theta;  ///< gamma-sweep with synthetic errors

  // output
  std::string output_dir = "out";
  bool text = false;
  std::vector<std::string> diagnostics{"deviation", "residuals", "holder"};

  bool operator==(const RunConfig&) const = default;

  bool wants(std::string_view diagnostic) const;
};

/// Parses a JSON document. Unknown keys, missing A, missing gamma (and
/// gamma_list) and violated positivity constraints raise ConfigError naming
/// the offending field.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Fully resolved document; parse_config(serialize_config(c).dump()) == c.
nlohmann::json serialize_config(const RunConfig& config);

TorusGrid make_space_grid(const RunConfig& config);
Environment make_environment(const RunConfig& config);
InitialData make_initial_data(const RunConfig& config);

/// Bounds used for "auto": [lo - 8 sqrt(s), hi + 8 sqrt(s)] where [lo, hi]
/// covers y_opt over [0, t_end] and Z0, and s = max(A, V0).
std::pair<double, double> auto_trait_bounds(const RunConfig& config);

TraitGrid make_trait_grid(const RunConfig& config);

/// Number of solver steps between snapshots.
std::size_t snapshot_stride(const RunConfig& config);

}  // namespace kinmac
