#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinmac/config.hpp"
#include "kinmac/diagnostics.hpp"

namespace kinmac {

/// Options shared by every command. Output goes to config.output_dir.
struct RunOptions {
  int jobs = 1;
  bool write_files = true;
};

/// Common header of every output file: format version and resolved config
/// (without output_dir).
nlohmann::json output_header(const RunConfig& config, const std::string& kind);

struct SimRunSummary {
  double t_end = 0.0;
  std::size_t steps = 0;
  double max_leak_rate = 0.0;
  double max_diffusion_defect = 0.0;
  double gauss_dev_sup = 0.0;  ///< over all snapshots; 0 when not requested
  double v_max = 0.0;
  std::vector<double> final_N;
  std::vector<double> final_Z;
};

/// Single kinetic run. Writes sim_series.csv, sim_summary.json and, when
/// requested, sim_residuals.csv and snapshots/.
SimRunSummary run_simulate_sim(const RunConfig& config, const RunOptions& options);

struct KbmRunSummary {
  double t_end = 0.0;
  std::size_t steps = 0;
  std::vector<double> final_N;
  std::vector<double> final_Z;
};

/// Single macroscopic run. Writes kbm_series.csv, kbm_summary.json and
/// optional snapshots/.
KbmRunSummary run_simulate_kbm(const RunConfig& config, const RunOptions& options);

/// One row per shared snapshot time.
struct CompareRow {
  double t = 0.0;
  double err_N = 0.0;
  double err_Z = 0.0;
  double gauss_dev = 0.0;
  double v_max = 0.0;
  double mass_leak = 0.0;
};

/// Suprema over [t_burn, t_end] (burned) and over the whole run (all).
struct CompareReport {
  double gamma = 0.0;
  double t_burn = 0.0;
  std::vector<CompareRow> rows;
  double gauss_dev_sup = 0.0;
  double gauss_dev_sup_all = 0.0;
  double macro_err_N = 0.0;
  double macro_err_N_all = 0.0;
  double macro_err_Z = 0.0;
  double macro_err_Z_all = 0.0;
  double resid_N = 0.0;
  double resid_Z = 0.0;
  double resid_spacing = 0.0;
  double v_max = 0.0;
  double v_max_burned = 0.0;
  double holder_N = 0.0;
  double holder_Z = 0.0;
  double max_leak_rate = 0.0;
  double max_diffusion_defect = 0.0;

  nlohmann::json summary_json() const;
};

/// Runs SIM and KBM from shared (N0, Z0) at config.gamma (or `gamma` when
/// given). Writes compare_series.csv and compare_summary.json.
CompareReport cmd_compare(const RunConfig& config, const RunOptions& options,
                          std::optional<double> gamma = std::nullopt);

struct FamilyFit {
  std::string family;
  std::optional<PowerLawFit> fit;  ///< empty when an error is not positive
  bool nonincreasing = false;
};

struct SweepReport {
  std::vector<double> gammas;
  std::vector<CompareReport> members;  ///< indexed like gammas; rows dropped
  std::vector<FamilyFit> fits;
  bool planted = false;

  /// Error values of one family (gauss_dev_sup, macro_err_N, macro_err_Z,
  /// resid_N, resid_Z, resid, v_max, v_max_burned) across gammas.
  std::vector<double> family(const std::string& name) const;
  const FamilyFit& fit(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Runs cmd_compare for every gamma in config.gamma_list (at least three),
/// members in parallel over options.jobs, each into its own subdirectory.
/// With planted_theta set, errors are synthetic 3 gamma^-theta and no
/// simulation runs. Writes sweep.csv and sweep.json.
SweepReport cmd_gamma_sweep(const RunConfig& config, const RunOptions& options);

struct PropertyResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct OperatorReport {
  std::vector<PropertyResult> properties;

  bool all_passed() const;
  const PropertyResult& get(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Seeded property suite for T and the Wasserstein distance on the config's
/// trait grid. `kernel_scale` != 1 corrupts the kernel of the fast path.
/// Writes operator_report.json.
OperatorReport cmd_check_operator(const RunConfig& config, const RunOptions& options,
                                  double kernel_scale = 1.0);

}  // namespace kinmac
