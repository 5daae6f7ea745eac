#pragma once

// Orchestration behind the command-line tool: runs, dual-run comparisons,
// manufactured-solution studies and closure tabulation.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twofluid/config.hpp"
#include "twofluid/verify.hpp"

namespace twofluid {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitRuntimeFailure = 3,
  kExitVerificationFailure = 4,
};

enum class RefMode { Twin, Fine, Mms };

RefMode parse_ref_mode(const std::string& text);
const char* to_string(RefMode mode);

struct CompareResult {
  RefMode mode = RefMode::Twin;
  std::vector<RERow> series;
  GronwallFit gronwall;
  EnergyAudit audit_run;
  EnergyAudit audit_reference;
  AlphaStabilityReport alpha_stability;
  std::vector<CoercivityReport> coercivity;
  double E_scale = 0.0;
  double noise_threshold = 0.0;
  double max_E_total = 0.0;

  bool passed() const;
};

/// Runs `run_config` against the reference selected by `mode`:
///   Twin: `reference_config` (or run_config itself) on the same grid,
///   Fine: `reference_config` (or run_config refined by fine_factor),
///         averaged onto the run grid,
///   Mms:  the exact manufactured solution (run_config must use preset mms).
CompareResult compare(const SimConfig& run_config, const std::optional<SimConfig>& reference_config,
                      RefMode mode, int fine_factor = 4, const std::string& base_dir = ".");

void write_re_report_csv(std::ostream& out, const std::vector<RERow>& series);
nlohmann::json compare_to_json(const CompareResult& result);

nlohmann::json run_report_json(const SimConfig& config, const std::vector<std::string>& warnings,
                               const Trajectory& traj);

struct ClosureTableSpec {
  double gamma_plus = 3.0;
  double gamma_minus = 1.5;
  double r_min = 0.0, r_max = 1.0;
  double q_min = 0.0, q_max = 1.0;
  int steps = 10;
  double tol = 1e-12;
  /// Alpha printed for vacuum rows (R = Q = 0).
  double vacuum_alpha = 0.0;
};

// Command entry points. Each returns a process exit code and writes only
// below `out_dir` (or to the given streams).
int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_run(const std::string& config_path, const std::string& out_dir, bool strict,
            std::ostream& log);
int cmd_compare(const std::string& config_path, const std::optional<std::string>& reference_path,
                RefMode mode, int fine_factor, const std::string& out_dir, bool strict,
                std::ostream& log);
int cmd_mms(const std::string& config_path, int levels, std::ostream& out, std::ostream& err);
int cmd_closure_table(const ClosureTableSpec& spec, std::ostream& out, std::ostream& err);

/// Convergence-study parameters taken from a config (n is the coarsest grid).
MmsStudySpec mms_spec_from(const SimConfig& config);

}  // namespace twofluid
