#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "twofluid/mms.hpp"
#include "twofluid/solver.hpp"
#include "json.hpp"

namespace twofluid {

/// Everything a run needs. Text form is sectioned `key = value`:
///
///   [physics]  gamma_plus gamma_minus mu lambda
///   [grid]     n length bc
///   [initial]  preset R0 Q0 u0 amp_R amp_Q amp_u center width wavenumber file
///              perturb_eps perturb_mode seed
///   [time]     t_end cfl snapshot_interval integrator
///   [solver]   closure_tol closure_max_iter vacuum_alpha density_floor strict
///              positivity_tol flux_sign_defect
///   [verify]   diagnostic_mode alpha_diagnostic energy_eps c_star c_star_upper
///              delta e0_floor
///   [mms]      a b c d e
struct SimConfig {
  double gamma_plus = 3.0;
  double gamma_minus = 1.5;
  double mu = 0.1;
  double lambda = 0.0;

  std::int64_t n = 256;
  double length = 1.0;
  BoundaryCondition bc = BoundaryCondition::Periodic;

  /// uniform | gaussian_bump | sine | from_file | mms
  std::string preset = "gaussian_bump";
  double R0 = 1.0;
  double Q0 = 1.0;
  double u0 = 0.0;
  double amp_R = 0.5;
  double amp_Q = 0.5;
  double amp_u = 0.0;
  double center = 0.5;
  double width = 0.1;
  std::int64_t wavenumber = 1;
  std::string file;
  double perturb_eps = 0.0;
  /// smooth | random
  std::string perturb_mode = "smooth";
  std::uint64_t seed = 0;

  double t_end = 0.1;
  double cfl = 0.5;
  double snapshot_interval = 0.01;
  TimeIntegrator integrator = TimeIntegrator::ForwardEuler;

  double closure_tol = 1e-12;
  std::int64_t closure_max_iter = 200;
  double vacuum_alpha = 0.5;
  double density_floor = 1e-12;
  /// Exploratory runs clip negative masses; `--strict` turns this on.
  bool strict = false;
  double positivity_tol = 0.0;
  bool flux_sign_defect = false;

  bool diagnostic_mode = false;
  bool alpha_diagnostic = true;
  double energy_eps = 1e-3;
  /// 0 selects the default window derived from the reference run.
  double c_star = 0.0;
  double c_star_upper = 0.0;
  double delta = 0.5;
  double e0_floor = 1e-14;

  MmsParameters mms{};

  bool operator==(const SimConfig&) const = default;

  Exponents exponents() const { return {gamma_plus, gamma_minus}; }
  Grid1D grid() const { return {n, length, bc}; }
  SchemeConfig scheme() const;
  DeriveOptions derive_options() const;
  bool forced() const { return preset == "mms"; }
};

struct ValidatedConfig {
  SimConfig config;
  std::vector<std::string> warnings;
};

/// Parses and validates config text. Throws ConfigError (ParseError with a
/// line number, or ValidationError naming the field). `base_dir` resolves a
/// relative `file` for the from_file preset.
ValidatedConfig validate_config(const std::string& text, const std::string& base_dir = ".");
ValidatedConfig load_config(const std::string& path);

/// Canonical text form; validate_config(serialize_config(c)).config == c.
std::string serialize_config(const SimConfig& config);
nlohmann::json config_to_json(const SimConfig& config);

/// Initial (R, Q, m) on the config's grid, including any perturbation.
FieldState initial_state(const SimConfig& config, const std::string& base_dir = ".");

/// Warnings for the weak-existence hypotheses on exponents and data.
std::vector<std::string> admissibility_warnings(const SimConfig& config,
                                                const FieldState& initial);

/// Manufactured solution matching the config, or nullptr when not forced.
std::shared_ptr<const MmsSolution> make_forcing(const SimConfig& config);

Solver make_solver(const SimConfig& config);

}  // namespace twofluid
