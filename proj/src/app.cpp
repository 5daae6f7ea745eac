#include "twofluid/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <tuple>

namespace twofluid {

namespace fs = std::filesystem;

RefMode parse_ref_mode(const std::string& text) {
  if (text == "twin") return RefMode::Twin;
  if (text == "fine") return RefMode::Fine;
  if (text == "mms") return RefMode::Mms;
  throw ConfigError(ErrorKind::ValidationError, "unknown --ref-mode '" + text + "'", "ref-mode");
}

const char* to_string(RefMode mode) {
  switch (mode) {
    case RefMode::Twin: return "twin";
    case RefMode::Fine: return "fine";
    case RefMode::Mms: return "mms";
  }
  return "twin";
}

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no inf/nan; those become strings.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

RunOptions run_options(const SimConfig& c) {
  RunOptions o;
  o.t_end = c.t_end;
  o.snapshot_interval = c.snapshot_interval;
  o.alpha_diagnostic = c.alpha_diagnostic;
  return o;
}

Trajectory simulate(const SimConfig& c, const std::string& base_dir) {
  return run(make_solver(c), initial_state(c, base_dir), run_options(c));
}

void require_compatible(const SimConfig& a, const SimConfig& b) {
  if (a.gamma_plus != b.gamma_plus || a.gamma_minus != b.gamma_minus) {
    throw ConfigError(ErrorKind::ValidationError, "compared runs must share gamma_plus/gamma_minus",
                      "physics");
  }
  if (a.length != b.length || a.bc != b.bc) {
    throw Error(ErrorKind::GridMismatch, "compared runs must share grid length and bc");
  }
  if (a.t_end != b.t_end || a.snapshot_interval != b.snapshot_interval) {
    throw Error(ErrorKind::TimeGridMismatch, "compared runs must share t_end and snapshot_interval");
  }
}

double alpha_l1_gap(const Snapshot& s, const Grid1D& grid) {
  if (s.alpha_transported.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  return (s.alpha_transported - s.derived.alpha).abs().sum() * grid.dx();
}

}  // namespace

bool CompareResult::passed() const {
  return audit_run.passed && audit_reference.passed && alpha_stability.finite;
}

CompareResult compare(const SimConfig& run_config, const std::optional<SimConfig>& reference_config,
                      RefMode mode, int fine_factor, const std::string& base_dir) {
  CompareResult out;
  out.mode = mode;
  const Exponents exps = run_config.exponents();
  const Trajectory traj = simulate(run_config, base_dir);
  Trajectory reference = traj;

  switch (mode) {
    case RefMode::Twin: {
      const SimConfig ref = reference_config.value_or(run_config);
      require_compatible(run_config, ref);
      if (ref.n != run_config.n) throw Error(ErrorKind::GridMismatch, "twin mode needs equal grids");
      reference = simulate(ref, base_dir);
      out.audit_reference = energy_audit(reference, ref.energy_eps);
      break;
    }
    case RefMode::Fine: {
      SimConfig ref = run_config;
      if (reference_config) {
        ref = *reference_config;
      } else {
        if (fine_factor < 2) {
          throw ConfigError(ErrorKind::ValidationError, "fine factor must be >= 2", "fine-factor");
        }
        ref.n = run_config.n * fine_factor;
      }
      require_compatible(run_config, ref);
      if (ref.n % run_config.n != 0 || ref.n <= run_config.n) {
        throw Error(ErrorKind::GridMismatch, "fine reference grid must nest the run grid");
      }
      const Trajectory fine = simulate(ref, base_dir);
      out.audit_reference = energy_audit(fine, ref.energy_eps);
      reference = restrict_trajectory(fine, traj.grid, exps, run_config.derive_options());
      break;
    }
    case RefMode::Mms: {
      if (!run_config.forced()) {
        throw ConfigError(ErrorKind::ValidationError, "mms reference mode needs preset = mms",
                          "initial.preset");
      }
      reference = mms_reference_trajectory(*make_forcing(run_config), traj, exps,
                                           run_config.derive_options());
      out.audit_reference.skipped = true;
      out.audit_reference.note = "exact manufactured solution";
      break;
    }
  }

  const double nu = run_config.scheme().nu_eff();
  out.series = relative_entropy_series(traj, reference, exps, nu);
  out.E_scale = reference.front().energy;
  out.noise_threshold = 1e3 * std::numeric_limits<double>::epsilon() * out.E_scale;
  out.gronwall = gronwall_check(out.series, run_config.e0_floor, out.noise_threshold);
  out.max_E_total = out.gronwall.max_E;
  out.audit_run = energy_audit(traj, run_config.energy_eps);
  out.alpha_stability = alpha_stability_check(traj, reference, run_config.delta);

  double lo = run_config.c_star, hi = run_config.c_star_upper;
  if (!(lo > 0.0)) std::tie(lo, hi) = default_essential_window(reference.front().derived);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Snapshot& a = traj.snapshots[k];
    const Snapshot& b = reference.snapshots[k];
    out.coercivity.push_back(
        coercivity_check(traj.grid, a.state, a.derived, b.state, b.derived, exps, lo, hi));
  }
  return out;
}

void write_re_report_csv(std::ostream& out, const std::vector<RERow>& series) {
  out << "t,E_kin,E_alpha,E_breg_plus,E_breg_minus,E_total,D\n";
  for (const RERow& r : series) {
    out << g17(r.t) << ',' << g17(r.E_kin) << ',' << g17(r.E_alpha) << ',' << g17(r.E_breg_plus)
        << ',' << g17(r.E_breg_minus) << ',' << g17(r.E_total) << ',' << g17(r.D) << '\n';
  }
}

namespace {

nlohmann::json audit_json(const EnergyAudit& a) {
  return {{"passed", a.passed},
          {"skipped", a.skipped},
          {"note", a.note},
          {"eps", a.eps},
          {"worst_margin", number(a.worst_margin)}};
}

}  // namespace

nlohmann::json compare_to_json(const CompareResult& r) {
  nlohmann::json j;
  j["ref_mode"] = to_string(r.mode);
  j["E_scale"] = number(r.E_scale);
  j["noise_threshold"] = number(r.noise_threshold);
  j["max_E_total"] = number(r.max_E_total);
  j["gronwall"] = {{"identical_data", r.gronwall.identical_data},
                   {"at_noise_floor", r.gronwall.at_noise_floor},
                   {"C_fit", number(r.gronwall.C_fit)},
                   {"C_exp_fit", number(r.gronwall.C_exp_fit)},
                   {"max_E", number(r.gronwall.max_E)},
                   {"fitted_points", r.gronwall.fitted_points}};
  j["energy_audit"] = {{"run", audit_json(r.audit_run)},
                       {"reference", audit_json(r.audit_reference)}};
  j["alpha_stability"] = {{"delta", r.alpha_stability.delta},
                          {"C_delta", number(r.alpha_stability.C_delta)},
                          {"finite", r.alpha_stability.finite},
                          {"max_growth", number(r.alpha_stability.max_growth)}};
  nlohmann::json coer = nlohmann::json::array();
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (std::size_t k = 0; k < r.coercivity.size(); ++k) {
    const CoercivityReport& c = r.coercivity[k];
    coer.push_back({{"t", r.series[k].t},
                    {"C_lb", number(c.C_lb)},
                    {"E_bar", c.E_bar},
                    {"rhs_essential", c.rhs_essential},
                    {"rhs_residual", c.rhs_residual},
                    {"n_essential", c.n_essential},
                    {"n_residual", c.n_residual}});
    if (std::isfinite(c.C_lb)) {
      cmin = std::min(cmin, c.C_lb);
      cmax = std::max(cmax, c.C_lb);
    }
  }
  j["coercivity"] = {
      {"c_star", r.coercivity.empty() ? 0.0 : r.coercivity.front().c_star},
      {"c_star_upper", r.coercivity.empty() ? 0.0 : r.coercivity.front().c_star_upper},
      {"C_lb_min", number(cmin)},
      {"C_lb_max", number(cmax)},
      {"series", coer}};
  j["passed"] = r.passed();
  return j;
}

nlohmann::json run_report_json(const SimConfig& config, const std::vector<std::string>& warnings,
                               const Trajectory& traj) {
  nlohmann::json j;
  j["config"] = config_to_json(config);
  j["warnings"] = warnings;
  j["grid"] = {{"n", traj.grid.n()},
               {"length", traj.grid.length()},
               {"dx", traj.grid.dx()},
               {"bc", to_string(traj.grid.bc())}};
  j["steps"] = traj.steps;

  constexpr std::size_t kMaxDtSamples = 1000;
  const std::size_t stride = std::max<std::size_t>(1, (traj.dt_series.size() + kMaxDtSamples - 1) /
                                                          kMaxDtSamples);
  nlohmann::json dts = nlohmann::json::array();
  for (std::size_t k = 0; k < traj.dt_series.size(); k += stride) dts.push_back(traj.dt_series[k]);
  double dt_min = std::numeric_limits<double>::infinity(), dt_max = 0.0;
  for (double dt : traj.dt_series) {
    dt_min = std::min(dt_min, dt);
    dt_max = std::max(dt_max, dt);
  }
  j["dt"] = {{"stride", stride}, {"min", number(traj.dt_series.empty() ? 0.0 : dt_min)},
             {"max", dt_max}, {"series", dts}};

  const TotalMass m0 = total_mass(traj.front().state, traj.grid);
  const TotalMass m1 = total_mass(traj.back().state, traj.grid);
  const auto drift = [](double a, double b) { return a != 0.0 ? std::abs(b - a) / std::abs(a) : std::abs(b); };
  j["conservation"] = {{"M_R_initial", m0.R}, {"M_Q_initial", m0.Q},
                       {"M_R_final", m1.R},   {"M_Q_final", m1.Q},
                       {"drift_R", drift(m0.R, m1.R)}, {"drift_Q", drift(m0.Q, m1.Q)}};

  const EnergyAudit audit = energy_audit(traj, config.energy_eps);
  j["energy"] = {{"times", audit.times},
                 {"energy", audit.energy},
                 {"dissipation", audit.dissipation},
                 {"audit", audit_json(audit)}};
  j["counters"] = {{"positivity_clips", traj.clips},
                   {"alpha_clamps", traj.alpha_clamps},
                   {"max_closure_iterations", traj.max_closure_iterations},
                   {"max_wave_speed", traj.max_wave_speed}};
  nlohmann::json gaps = nlohmann::json::array();
  for (const Snapshot& s : traj.snapshots) gaps.push_back(number(alpha_l1_gap(s, traj.grid)));
  j["alpha_diagnostic"] = {{"enabled", config.alpha_diagnostic}, {"l1_gap", gaps}};
  return j;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ValidationError, "cannot write " + path.string());
  out << text;
}

void write_failure(const fs::path& dir, const Error& e) {
  nlohmann::json j = {{"error", to_string(e.kind())}, {"message", e.what()}};
  if (e.has_cell()) j["cell"] = e.cell();
  j["time"] = e.time();
  write_text(dir / "failure.json", j.dump(2) + "\n");
}

std::string base_dir_of(const std::string& config_path) {
  const fs::path dir = fs::path(config_path).parent_path();
  return dir.empty() ? "." : dir.string();
}

}  // namespace

int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
  try {
    const ValidatedConfig v = load_config(config_path);
    for (const std::string& w : v.warnings) err << "warning: " << w << '\n';
    out << serialize_config(v.config);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    err << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitConfigError;
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool strict,
            std::ostream& log) {
  ValidatedConfig v;
  try {
    v = load_config(config_path);
  } catch (const Error& e) {
    log << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitConfigError;
  }
  if (strict) v.config.strict = true;
  for (const std::string& w : v.warnings) log << "warning: " << w << '\n';

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  try {
    const Trajectory traj = simulate(v.config, base_dir_of(config_path));
    nlohmann::json report = run_report_json(v.config, v.warnings, traj);
    nlohmann::json files = nlohmann::json::array();
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
      const Snapshot& s = traj.snapshots[k];
      write_snapshot_csv((dir / name).string(), s.state, s.derived, traj.grid);
      files.push_back({{"file", name}, {"t", s.state.t}});
    }
    report["snapshots"] = files;
    write_text(dir / "report.json", report.dump(2) + "\n");
    log << "run finished: " << traj.steps << " steps, " << traj.snapshots.size()
        << " snapshots in " << dir.string() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    write_failure(dir, e);
    log << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitRuntimeFailure;
  }
}

int cmd_compare(const std::string& config_path, const std::optional<std::string>& reference_path,
                RefMode mode, int fine_factor, const std::string& out_dir, bool strict,
                std::ostream& log) {
  ValidatedConfig a;
  std::optional<SimConfig> b;
  try {
    a = load_config(config_path);
    if (reference_path) b = load_config(*reference_path).config;
  } catch (const Error& e) {
    log << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitConfigError;
  }
  if (strict) {
    a.config.strict = true;
    if (b) b->strict = true;
  }
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  try {
    const CompareResult r = compare(a.config, b, mode, fine_factor, base_dir_of(config_path));
    std::ofstream csv(dir / "re_report.csv", std::ios::binary);
    write_re_report_csv(csv, r.series);
    csv.close();
    write_text(dir / "verify.json", compare_to_json(r).dump(2) + "\n");
    log << "max E_total = " << g17(r.max_E_total)
        << (r.gronwall.at_noise_floor ? " (noise floor)" : "") << '\n';
    return r.passed() ? kExitOk : kExitVerificationFailure;
  } catch (const ConfigError& e) {
    log << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    write_failure(dir, e);
    log << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitRuntimeFailure;
  }
}

MmsStudySpec mms_spec_from(const SimConfig& c) {
  MmsStudySpec spec;
  spec.n0 = c.n;
  spec.length = c.length;
  spec.exps = c.exponents();
  spec.scheme = c.scheme();
  spec.derive = c.derive_options();
  spec.mms = c.mms;
  spec.t_end = c.t_end;
  return spec;
}

int cmd_mms(const std::string& config_path, int levels, std::ostream& out, std::ostream& err) {
  if (levels < 3) {
    err << "usage: mms needs --levels >= 3\n";
    return kExitConfigError;
  }
  ValidatedConfig v;
  try {
    v = load_config(config_path);
    if (v.config.bc != BoundaryCondition::Periodic) {
      throw ConfigError(ErrorKind::ValidationError, "grid.bc: mms study needs periodic", "grid.bc");
    }
  } catch (const Error& e) {
    err << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitConfigError;
  }
  try {
    const ConvergenceReport rep = convergence_study(mms_spec_from(v.config), levels);
    out << "n,err_R,err_Q,err_u,order_R,order_Q,order_u\n";
    for (std::size_t k = 0; k < rep.n.size(); ++k) {
      out << rep.n[k] << ',' << g17(rep.err_R[k]) << ',' << g17(rep.err_Q[k]) << ','
          << g17(rep.err_u[k]);
      if (k == 0) {
        out << ",,,\n";
      } else {
        out << ',' << g17(rep.order_R[k - 1]) << ',' << g17(rep.order_Q[k - 1]) << ','
            << g17(rep.order_u[k - 1]) << '\n';
      }
    }
    const bool ok = rep.passes(0.8);
    out << "min_order," << g17(rep.min_order()) << (ok ? ",pass\n" : ",fail\n");
    return ok ? kExitOk : kExitVerificationFailure;
  } catch (const Error& e) {
    err << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitRuntimeFailure;
  }
}

int cmd_closure_table(const ClosureTableSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.steps < 1 || spec.r_min < 0.0 || spec.q_min < 0.0 || spec.r_max < spec.r_min ||
      spec.q_max < spec.q_min) {
    err << "closure: ranges must be non-negative and ordered, steps >= 1\n";
    return kExitConfigError;
  }
  try {
    const Exponents exps(spec.gamma_plus, spec.gamma_minus);
    ClosureOptions<double> opts;
    opts.rel_tol = spec.tol;
    opts.vacuum_alpha = spec.vacuum_alpha;
    out << "R,Q,Z,alpha,rho_minus,p,vacuum\n";
    for (int i = 0; i <= spec.steps; ++i) {
      const double R = spec.r_min + (spec.r_max - spec.r_min) * double(i) / double(spec.steps);
      for (int k = 0; k <= spec.steps; ++k) {
        const double Q = spec.q_min + (spec.q_max - spec.q_min) * double(k) / double(spec.steps);
        const ClosureState<double> s = recover_state(R, Q, exps, opts);
        out << g17(R) << ',' << g17(Q) << ',' << g17(s.Z) << ',' << g17(s.alpha) << ','
            << g17(s.rho_minus) << ',' << g17(s.p) << ',' << (s.vacuum_flag ? 1 : 0) << '\n';
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    err << to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::ValidationError ? kExitConfigError : kExitRuntimeFailure;
  }
}

}  // namespace twofluid
