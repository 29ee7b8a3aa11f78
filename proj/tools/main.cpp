// kinmac command-line driver.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kinmac/config.hpp"
#include "kinmac/errors.hpp"
#include "kinmac/experiments.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitProperty = 3;

struct Flags {
  std::string config;
  std::optional<std::string> out;
  bool text = false;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "config file (JSON)")->required();
  cmd->add_option("--out", f.out, "output directory (overrides output_dir)");
  cmd->add_flag("--text", f.text, "write snapshots as CSV instead of binary");
  cmd->add_option("--seed", f.seed, "seed for randomized diagnostics");
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
}

kinmac::RunConfig resolve(const Flags& f) {
  kinmac::RunConfig c = kinmac::load_config(f.config);
  if (f.out) c.output_dir = *f.out;
  if (f.text) c.text = true;
  if (f.seed) c.seed = *f.seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic infinitesimal model and its macroscopic limit"};
  app.require_subcommand(1);

  Flags flags;
  double kernel_scale = 1.0;
  auto* sim = app.add_subcommand("simulate-sim", "run the kinetic model");
  auto* kbm = app.add_subcommand("simulate-kbm", "run the macroscopic model");
  auto* compare = app.add_subcommand("compare", "kinetic vs macroscopic at one gamma");
  auto* sweep = app.add_subcommand("gamma-sweep", "compare over gamma_list and fit rates");
  auto* check = app.add_subcommand("check-operator", "property suite for the reproduction operator");
  for (auto* cmd : {sim, kbm, compare, sweep, check}) add_flags(cmd, flags);
  check->add_option("--kernel-scale", kernel_scale, "multiply the kernel (fault injection)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const kinmac::RunConfig config = resolve(flags);
    const kinmac::RunOptions options{flags.jobs, true};
    if (*sim) {
      kinmac::run_simulate_sim(config, options);
    } else if (*kbm) {
      kinmac::run_simulate_kbm(config, options);
    } else if (*compare) {
      kinmac::cmd_compare(config, options);
    } else if (*sweep) {
      kinmac::cmd_gamma_sweep(config, options);
    } else if (*check) {
      const kinmac::OperatorReport report = kinmac::cmd_check_operator(config, options, kernel_scale);
      for (const auto& p : report.properties) {
        std::cout << (p.passed ? "PASS " : "FAIL ") << p.name << " " << p.value << " <= "
                  << p.threshold << "\n";
      }
      if (!report.all_passed()) return kExitProperty;
    }
  } catch (const kinmac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const kinmac::PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const kinmac::InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return 0;
}
