#include "kinmac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kinmac/errors.hpp"

namespace kinmac {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kDiagnostics{"deviation", "residuals", "holder",
                                                      "snapshots"};

[[noreturn]] void fail(std::string_view field, std::string_view what) {
  throw ConfigError(std::string(field) + ": " + std::string(what));
}

double get_number(const json& v, std::string_view field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "must be finite");
  return x;
}

int get_int(const json& v, std::string_view field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<int>();
}

double positive(double x, std::string_view field) {
  if (!(x > 0.0)) {
    std::ostringstream msg;
    msg << "must be positive (got " << x << ")";
    fail(field, msg.str());
  }
  return x;
}

SpatialProfile parse_profile(const json& v, std::string_view field, SpatialProfile out) {
  if (v.is_number()) {
    out.mean = get_number(v, field);
    out.amplitude = 0.0;
    return out;
  }
  if (!v.is_object()) fail(field, "expected a number or an object");
  for (const auto& [key, value] : v.items()) {
    const std::string name = std::string(field) + "." + key;
    if (key == "mean") out.mean = get_number(value, name);
    else if (key == "amplitude") out.amplitude = get_number(value, name);
    else if (key == "wavenumber") out.wavenumber = get_int(value, name);
    else if (key == "wavenumber_y") out.wavenumber_y = get_int(value, name);
    else if (key == "phase") out.phase = get_number(value, name);
    else fail(name, "unknown key");
  }
  if (out.wavenumber < 0 || out.wavenumber_y < 0) fail(field, "wavenumbers must be nonnegative");
  return out;
}

json profile_json(const SpatialProfile& p) {
  return json{{"mean", p.mean},
              {"amplitude", p.amplitude},
              {"wavenumber", p.wavenumber},
              {"wavenumber_y", p.wavenumber_y},
              {"phase", p.phase}};
}

EnvironmentSpec parse_environment(const json& v) {
  if (!v.is_object()) fail("env", "expected an object");
  EnvironmentSpec spec;
  json profile = json::object();
  for (const auto& [key, value] : v.items()) {
    if (key == "kind") {
      if (!value.is_string()) fail("env.kind", "expected a string");
      try {
        spec.kind = environment_kind_from_string(value.get<std::string>());
      } catch (const PreconditionError& e) {
        fail("env.kind", e.what());
      }
    } else if (key == "drift") {
      spec.drift = get_number(value, "env.drift");
    } else {
      profile[key] = value;
    }
  }
  spec.profile = parse_profile(profile, "env", SpatialProfile{0.0, 0.0, 1, 0, 0.0});
  return spec;
}

}  // namespace

bool RunConfig::wants(std::string_view diagnostic) const {
  return std::find(diagnostics.begin(), diagnostics.end(), diagnostic) != diagnostics.end();
}

std::pair<double, double> auto_trait_bounds(const RunConfig& c) {
  const double drift_end = c.env.drift * c.t_end;
  double lo = std::min({c.env.profile.minimum(), c.env.profile.minimum() + drift_end, c.Z0.minimum()});
  double hi = std::max({c.env.profile.maximum(), c.env.profile.maximum() + drift_end, c.Z0.maximum()});
  const double spread = 8.0 * std::sqrt(std::max(c.A, c.V0));
  return {lo - spread, hi + spread};
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig c;
  bool have_A = false, have_V0 = false;
  std::optional<double> trait_min, trait_max;
  for (const auto& [key, v] : doc.items()) {
    if (key == "A") {
      c.A = positive(get_number(v, key), key);
      have_A = true;
    } else if (key == "gamma") {
      if (!v.is_null()) c.gamma = positive(get_number(v, key), key);
    } else if (key == "gamma_list") {
      if (!v.is_array()) fail(key, "expected an array of numbers");
      for (const auto& g : v) c.gamma_list.push_back(positive(get_number(g, key), key));
    } else if (key == "env") {
      c.env = parse_environment(v);
    } else if (key == "N0") {
      c.N0 = parse_profile(v, key, c.N0);
    } else if (key == "Z0") {
      c.Z0 = parse_profile(v, key, c.Z0);
    } else if (key == "V0") {
      if (!(v.is_string() && v.get<std::string>() == "auto")) {
        c.V0 = positive(get_number(v, key), key);
        have_V0 = true;
      }
    } else if (key == "dim") {
      c.dim = get_int(v, key);
    } else if (key == "points_x") {
      c.points_x = get_int(v, key);
    } else if (key == "period") {
      c.period = positive(get_number(v, key), key);
    } else if (key == "trait_min" || key == "trait_max") {
      auto& slot = key == "trait_min" ? trait_min : trait_max;
      if (!(v.is_string() && v.get<std::string>() == "auto")) slot = get_number(v, key);
    } else if (key == "points_y") {
      c.points_y = get_int(v, key);
    } else if (key == "dt") {
      c.dt = positive(get_number(v, key), key);
    } else if (key == "t_end") {
      c.t_end = get_number(v, key);
      if (c.t_end < 0.0) fail(key, "must be nonnegative");
    } else if (key == "snapshot_interval") {
      c.snapshot_interval = positive(get_number(v, key), key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) fail(key, "expected a nonnegative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "holder_theta") {
      c.holder_theta = get_number(v, key);
      if (!(c.holder_theta > 0.0 && c.holder_theta < 1.0)) fail(key, "must lie in (0, 1)");
    } else if (key == "planted_theta") {
      if (!v.is_null()) c.planted_theta = get_number(v, key);
    } else if (key == "output_dir") {
      if (!v.is_string()) fail(key, "expected a string");
      c.output_dir = v.get<std::string>();
    } else if (key == "text") {
      if (!v.is_boolean()) fail(key, "expected true or false");
      c.text = v.get<bool>();
    } else if (key == "diagnostics") {
      if (!v.is_array()) fail(key, "expected an array of strings");
      c.diagnostics.clear();
      for (const auto& d : v) {
        if (!d.is_string() || !kDiagnostics.contains(d.get<std::string>())) {
          fail(key, "unknown diagnostic " + d.dump() +
                        " (known: deviation, residuals, holder, snapshots)");
        }
        c.diagnostics.push_back(d.get<std::string>());
      }
    } else {
      fail(key, "unknown key");
    }
  }

  if (!have_A) fail("A", "missing (phenotypic variance is required)");
  if (!c.gamma && c.gamma_list.empty()) fail("gamma", "missing (give gamma or gamma_list)");
  if (!std::is_sorted(c.gamma_list.begin(), c.gamma_list.end()) ||
      std::adjacent_find(c.gamma_list.begin(), c.gamma_list.end()) != c.gamma_list.end()) {
    fail("gamma_list", "must be strictly increasing");
  }
  if (c.dim != 1 && c.dim != 2) fail("dim", "must be 1 or 2");
  if (c.points_x < 4) fail("points_x", "must be at least 4");
  if (c.points_y < 16) fail("points_y", "must be at least 16");
  if (!(c.N0.minimum() > 0.0)) {
    fail("N0", "Assumption (ii) violated: min N0 must be positive");
  }
  if (!have_V0) c.V0 = c.A;
  try {
    (void)make_environment(c);
  } catch (const PreconditionError& e) {
    fail("env", e.what());
  }
  const auto bounds = auto_trait_bounds(c);
  c.trait_min = trait_min.value_or(bounds.first);
  c.trait_max = trait_max.value_or(bounds.second);
  if (!(c.trait_min < c.trait_max)) fail("trait_min", "must be below trait_max");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

json serialize_config(const RunConfig& c) {
  json env = profile_json(c.env.profile);
  env["kind"] = std::string(to_string(c.env.kind));
  env["drift"] = c.env.drift;
  json doc{{"A", c.A},
           {"gamma_list", c.gamma_list},
           {"env", env},
           {"N0", profile_json(c.N0)},
           {"Z0", profile_json(c.Z0)},
           {"V0", c.V0},
           {"dim", c.dim},
           {"points_x", c.points_x},
           {"period", c.period},
           {"trait_min", c.trait_min},
           {"trait_max", c.trait_max},
           {"points_y", c.points_y},
           {"dt", c.dt},
           {"t_end", c.t_end},
           {"snapshot_interval", c.snapshot_interval},
           {"seed", c.seed},
           {"holder_theta", c.holder_theta},
           {"output_dir", c.output_dir},
           {"text", c.text},
           {"diagnostics", c.diagnostics}};
  doc["gamma"] = c.gamma ? json(*c.gamma) : json(nullptr);
  doc["planted_theta"] = c.planted_theta ? json(*c.planted_theta) : json(nullptr);
  return doc;
}

TorusGrid make_space_grid(const RunConfig& c) { return make_torus_grid(c.dim, c.points_x, c.period); }

Environment make_environment(const RunConfig& c) {
  return Environment(c.env.kind, c.env.profile, c.env.drift, c.period);
}

InitialData make_initial_data(const RunConfig& c) { return InitialData{c.N0, c.Z0, c.V0}; }

TraitGrid make_trait_grid(const RunConfig& c) { return TraitGrid(c.trait_min, c.trait_max, c.points_y); }

std::size_t snapshot_stride(const RunConfig& c) {
  return static_cast<std::size_t>(std::max(1.0, std::round(c.snapshot_interval / c.dt)));
}

}  // namespace kinmac
