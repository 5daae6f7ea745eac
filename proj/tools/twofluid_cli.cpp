// twofluid: command-line driver for runs, comparisons and verification studies.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "twofluid/app.hpp"

int main(int argc, char** argv) {
  using namespace twofluid;
  CLI::App app{"1D two-fluid compressible Navier-Stokes simulator with relative-entropy verification"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  bool strict = false;

  auto* run_cmd = app.add_subcommand("run", "Run a simulation and write snapshots + report.json");
  run_cmd->add_option("--config", config_path, "config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_flag("--strict", strict, "fail on positivity loss instead of clipping");

  std::string reference_path;
  std::string ref_mode = "twin";
  int fine_factor = 4;
  auto* cmp_cmd = app.add_subcommand("compare", "Relative entropy between a run and a reference");
  cmp_cmd->add_option("--config", config_path, "config of the run")->required();
  cmp_cmd->add_option("--config-b", reference_path, "config of the reference run");
  cmp_cmd->add_option("--ref-mode", ref_mode, "twin | fine | mms")
      ->check(CLI::IsMember({"twin", "fine", "mms"}));
  cmp_cmd->add_option("--fine-factor", fine_factor, "refinement factor of the fine reference");
  cmp_cmd->add_option("--out", out_dir, "output directory");
  cmp_cmd->add_flag("--strict", strict, "fail on positivity loss instead of clipping");

  int levels = 3;
  auto* mms_cmd = app.add_subcommand("mms", "Manufactured-solution convergence study");
  mms_cmd->add_option("--config", config_path, "config file (n is the coarsest grid)")->required();
  mms_cmd->add_option("--levels", levels, "number of grids (>= 3)");

  ClosureTableSpec table;
  auto* closure_cmd = app.add_subcommand("closure", "Tabulate (R, Q) -> (Z, alpha, p) as CSV");
  closure_cmd->add_option("--gamma-plus", table.gamma_plus, "adiabatic exponent of phase +");
  closure_cmd->add_option("--gamma-minus", table.gamma_minus, "adiabatic exponent of phase -");
  closure_cmd->add_option("--r-min", table.r_min);
  closure_cmd->add_option("--r-max", table.r_max);
  closure_cmd->add_option("--q-min", table.q_min);
  closure_cmd->add_option("--q-max", table.q_max);
  closure_cmd->add_option("--steps", table.steps, "intervals per axis; rows = (steps+1)^2");
  closure_cmd->add_option("--tol", table.tol, "relative closure tolerance");
  closure_cmd->add_option("--vacuum-alpha", table.vacuum_alpha, "alpha printed for R = Q = 0");

  auto* validate_cmd = app.add_subcommand("validate", "Validate a config and print it normalized");
  validate_cmd->add_option("--config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (*run_cmd) return cmd_run(config_path, out_dir, strict, std::cerr);
  if (*cmp_cmd) {
    std::optional<std::string> ref;
    if (!reference_path.empty()) ref = reference_path;
    return cmd_compare(config_path, ref, parse_ref_mode(ref_mode), fine_factor, out_dir, strict,
                       std::cerr);
  }
  if (*mms_cmd) return cmd_mms(config_path, levels, std::cout, std::cerr);
  if (*closure_cmd) return cmd_closure_table(table, std::cout, std::cerr);
  if (*validate_cmd) return cmd_validate(config_path, std::cout, std::cerr);
  return kExitConfigError;
}
