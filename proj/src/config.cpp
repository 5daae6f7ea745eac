#include "twofluid/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace twofluid {

namespace pt = boost::property_tree;

SchemeConfig SimConfig::scheme() const {
  SchemeConfig s;
  s.cfl = cfl;
  s.mu = mu;
  s.lambda = lambda;
  s.integrator = integrator;
  s.strict = strict;
  s.positivity_tol = positivity_tol;
  s.flux_sign_defect = flux_sign_defect;
  return s;
}

DeriveOptions SimConfig::derive_options() const {
  DeriveOptions d;
  d.closure.rel_tol = closure_tol;
  d.closure.max_iter = int(closure_max_iter);
  d.closure.vacuum_alpha = vacuum_alpha;
  d.density_floor = density_floor;
  return d;
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw ConfigError(ErrorKind::ValidationError, field + ": " + what, field);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& field, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    invalid(field, "expected a number, got '" + text + "'");
  }
  if (used != text.size()) invalid(field, "expected a number, got '" + text + "'");
  return v;
}

std::int64_t parse_int(const std::string& field, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    invalid(field, "expected an integer, got '" + text + "'");
  }
  if (used != text.size()) invalid(field, "expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  invalid(field, "expected true/false, got '" + text + "'");
}

// One binding per key: how to read it into the config and how to print it.
struct Binding {
  std::function<void(SimConfig&, const std::string&, const std::string&)> read;
  std::function<std::string(const SimConfig&)> write;
  /// Typed JSON value; unset bindings echo their text form.
  std::function<nlohmann::json(const SimConfig&)> value = {};
};

using Table = std::vector<std::pair<std::string, Binding>>;

Binding real(double SimConfig::*member) {
  return {[member](SimConfig& c, const std::string& f, const std::string& v) {
            c.*member = parse_double(f, v);
          },
          [member](const SimConfig& c) { return format_double(c.*member); },
          [member](const SimConfig& c) { return nlohmann::json(c.*member); }};
}

Binding integer(std::int64_t SimConfig::*member) {
  return {[member](SimConfig& c, const std::string& f, const std::string& v) {
            c.*member = parse_int(f, v);
          },
          [member](const SimConfig& c) { return std::to_string(c.*member); },
          [member](const SimConfig& c) { return nlohmann::json(c.*member); }};
}

Binding boolean(bool SimConfig::*member) {
  return {[member](SimConfig& c, const std::string& f, const std::string& v) {
            c.*member = parse_bool(f, v);
          },
          [member](const SimConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [member](const SimConfig& c) { return nlohmann::json(c.*member); }};
}

Binding text(std::string SimConfig::*member) {
  return {[member](SimConfig& c, const std::string&, const std::string& v) { c.*member = v; },
          [member](const SimConfig& c) { return c.*member; }};
}

Binding mms_real(double MmsParameters::*member) {
  return {[member](SimConfig& c, const std::string& f, const std::string& v) {
            c.mms.*member = parse_double(f, v);
          },
          [member](const SimConfig& c) { return format_double(c.mms.*member); },
          [member](const SimConfig& c) { return nlohmann::json(c.mms.*member); }};
}

const std::vector<std::pair<std::string, Table>>& schema() {
  static const std::vector<std::pair<std::string, Table>> s = {
      {"physics",
       {{"gamma_plus", real(&SimConfig::gamma_plus)},
        {"gamma_minus", real(&SimConfig::gamma_minus)},
        {"mu", real(&SimConfig::mu)},
        {"lambda", real(&SimConfig::lambda)}}},
      {"grid",
       {{"n", integer(&SimConfig::n)},
        {"length", real(&SimConfig::length)},
        {"bc",
         {[](SimConfig& c, const std::string& f, const std::string& v) {
            if (v == "periodic") {
              c.bc = BoundaryCondition::Periodic;
            } else if (v == "noslip") {
              c.bc = BoundaryCondition::NoSlip;
            } else {
              invalid(f, "expected periodic or noslip, got '" + v + "'");
            }
          },
          [](const SimConfig& c) { return std::string(to_string(c.bc)); }}}}},
      {"initial",
       {{"preset", text(&SimConfig::preset)},
        {"R0", real(&SimConfig::R0)},
        {"Q0", real(&SimConfig::Q0)},
        {"u0", real(&SimConfig::u0)},
        {"amp_R", real(&SimConfig::amp_R)},
        {"amp_Q", real(&SimConfig::amp_Q)},
        {"amp_u", real(&SimConfig::amp_u)},
        {"center", real(&SimConfig::center)},
        {"width", real(&SimConfig::width)},
        {"wavenumber", integer(&SimConfig::wavenumber)},
        {"file", text(&SimConfig::file)},
        {"perturb_eps", real(&SimConfig::perturb_eps)},
        {"perturb_mode", text(&SimConfig::perturb_mode)},
        {"seed",
         {[](SimConfig& c, const std::string& f, const std::string& v) {
            const std::int64_t s = parse_int(f, v);
            if (s < 0) invalid(f, "seed must be non-negative");
            c.seed = std::uint64_t(s);
          },
          [](const SimConfig& c) { return std::to_string(c.seed); },
          [](const SimConfig& c) { return nlohmann::json(c.seed); }}}}},
      {"time",
       {{"t_end", real(&SimConfig::t_end)},
        {"cfl", real(&SimConfig::cfl)},
        {"snapshot_interval", real(&SimConfig::snapshot_interval)},
        {"integrator",
         {[](SimConfig& c, const std::string& f, const std::string& v) {
            if (v == "euler") {
              c.integrator = TimeIntegrator::ForwardEuler;
            } else if (v == "ssprk2") {
              c.integrator = TimeIntegrator::SSPRK2;
            } else {
              invalid(f, "expected euler or ssprk2, got '" + v + "'");
            }
          },
          [](const SimConfig& c) { return std::string(to_string(c.integrator)); }}}}},
      {"solver",
       {{"closure_tol", real(&SimConfig::closure_tol)},
        {"closure_max_iter", integer(&SimConfig::closure_max_iter)},
        {"vacuum_alpha", real(&SimConfig::vacuum_alpha)},
        {"density_floor", real(&SimConfig::density_floor)},
        {"strict", boolean(&SimConfig::strict)},
        {"positivity_tol", real(&SimConfig::positivity_tol)},
        {"flux_sign_defect", boolean(&SimConfig::flux_sign_defect)}}},
      {"verify",
       {{"diagnostic_mode", boolean(&SimConfig::diagnostic_mode)},
        {"alpha_diagnostic", boolean(&SimConfig::alpha_diagnostic)},
        {"energy_eps", real(&SimConfig::energy_eps)},
        {"c_star", real(&SimConfig::c_star)},
        {"c_star_upper", real(&SimConfig::c_star_upper)},
        {"delta", real(&SimConfig::delta)},
        {"e0_floor", real(&SimConfig::e0_floor)}}},
      {"mms",
       {{"a", mms_real(&MmsParameters::a)},
        {"b", mms_real(&MmsParameters::b)},
        {"c", mms_real(&MmsParameters::c)},
        {"d", mms_real(&MmsParameters::d)},
        {"e", mms_real(&MmsParameters::e)}}},
  };
  return s;
}

void check_finite(const SimConfig& c) {
  for (const auto& [section, table] : schema()) {
    for (const auto& [key, binding] : table) {
      const std::string v = binding.write(c);
      if (v == "nan" || v == "-nan" || v == "inf" || v == "-inf") {
        invalid(section + "." + key, "must be finite");
      }
    }
  }
}

void check_constraints(const SimConfig& c) {
  check_finite(c);
  if (!(c.gamma_plus > 1.0)) invalid("physics.gamma_plus", "must be > 1 (Helmholtz energy undefined otherwise)");
  if (!(c.gamma_minus > 1.0)) invalid("physics.gamma_minus", "must be > 1 (Helmholtz energy undefined otherwise)");
  if (c.mu < 0.0) invalid("physics.mu", "must be >= 0");
  if (!(c.mu > 0.0) && !c.diagnostic_mode) {
    invalid("physics.mu", "must be > 0 unless verify.diagnostic_mode = true");
  }
  if (2.0 * c.mu + 3.0 * c.lambda < 0.0) invalid("physics.lambda", "requires 2 mu + 3 lambda >= 0");
  if (c.n < 4) invalid("grid.n", "must be >= 4");
  if (!(c.length > 0.0)) invalid("grid.length", "must be > 0");
  static const std::set<std::string> presets = {"uniform", "gaussian_bump", "sine", "from_file",
                                                "mms"};
  if (!presets.count(c.preset)) invalid("initial.preset", "unknown preset '" + c.preset + "'");
  if (c.preset == "from_file" && c.file.empty()) invalid("initial.file", "required by from_file");
  if (c.preset == "mms" && c.bc != BoundaryCondition::Periodic) {
    invalid("grid.bc", "the mms preset needs a periodic grid");
  }
  if (c.preset == "gaussian_bump" && !(c.width > 0.0)) invalid("initial.width", "must be > 0");
  if (c.perturb_mode != "smooth" && c.perturb_mode != "random") {
    invalid("initial.perturb_mode", "expected smooth or random");
  }
  if (std::abs(c.perturb_eps) >= 1.0) invalid("initial.perturb_eps", "must satisfy |eps| < 1");
  if (!(c.t_end >= 0.0)) invalid("time.t_end", "must be >= 0");
  if (!(c.cfl > 0.0) || c.cfl > 1.0) invalid("time.cfl", "must lie in (0, 1]");
  if (c.snapshot_interval < 0.0) invalid("time.snapshot_interval", "must be >= 0");
  if (!(c.closure_tol > 0.0)) invalid("solver.closure_tol", "must be > 0");
  if (c.closure_max_iter < 1) invalid("solver.closure_max_iter", "must be >= 1");
  if (c.vacuum_alpha < 0.0 || c.vacuum_alpha > 1.0) invalid("solver.vacuum_alpha", "must lie in [0, 1]");
  if (!(c.density_floor > 0.0)) invalid("solver.density_floor", "must be > 0");
  if (c.positivity_tol < 0.0) invalid("solver.positivity_tol", "must be >= 0");
  if (c.energy_eps < 0.0) invalid("verify.energy_eps", "must be >= 0");
  if (c.c_star < 0.0 || c.c_star_upper < 0.0) invalid("verify.c_star", "must be >= 0");
  if ((c.c_star > 0.0 || c.c_star_upper > 0.0) && !(c.c_star > 0.0 && c.c_star < c.c_star_upper)) {
    invalid("verify.c_star", "needs 0 < c_star < c_star_upper (or both 0 for the default)");
  }
  if (c.delta < 0.0) invalid("verify.delta", "must be >= 0");
  if (!(c.e0_floor > 0.0)) invalid("verify.e0_floor", "must be > 0");
  if (c.preset == "mms") {
    if (!(c.mms.a > std::abs(c.mms.b))) invalid("mms.a", "must exceed |b| to keep R positive");
    if (!(c.mms.c > std::abs(c.mms.d))) invalid("mms.c", "must exceed |d| to keep Q positive");
  }
}

}  // namespace

ValidatedConfig validate_config(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(ErrorKind::ParseError,
                      "line " + std::to_string(e.line()) + ", column 1: " + e.message(), {},
                      int(e.line()), 1);
  }

  ValidatedConfig out;
  SimConfig& c = out.config;
  for (const auto& [section, entries] : tree) {
    if (!entries.data().empty()) invalid(section, "key outside of any section");
    const auto sit = std::find_if(schema().begin(), schema().end(),
                                  [&](const auto& s) { return s.first == section; });
    if (sit == schema().end()) invalid(section, "unknown section");
    for (const auto& [key, value] : entries) {
      const std::string field = section + "." + key;
      const auto kit = std::find_if(sit->second.begin(), sit->second.end(),
                                    [&](const auto& k) { return k.first == key; });
      if (kit == sit->second.end()) invalid(field, "unknown key");
      kit->second.read(c, field, value.data());
    }
  }
  check_constraints(c);
  const FieldState init = initial_state(c, base_dir);
  for (Eigen::Index i = 0; i < init.size(); ++i) {
    if (!(init.R(i) >= 0.0) || !(init.Q(i) >= 0.0) || !std::isfinite(init.m(i))) {
      invalid("initial", "initial partial masses must be finite and >= 0 (cell " +
                             std::to_string(i) + ")");
    }
  }
  out.warnings = admissibility_warnings(c, init);
  return out;
}

ValidatedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ErrorKind::ParseError, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return validate_config(ss.str(), dir.empty() ? "." : dir.string());
}

std::string serialize_config(const SimConfig& c) {
  std::string out;
  for (const auto& [section, table] : schema()) {
    if (!out.empty()) out += '\n';
    out += "[" + section + "]\n";
    for (const auto& [key, binding] : table) out += key + " = " + binding.write(c) + "\n";
  }
  return out;
}

nlohmann::json config_to_json(const SimConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [section, table] : schema()) {
    nlohmann::json s = nlohmann::json::object();
    for (const auto& [key, binding] : table) {
      s[key] = binding.value ? binding.value(c) : nlohmann::json(binding.write(c));
    }
    j[section] = s;
  }
  return j;
}

namespace {

FieldState read_profile_file(const std::string& path, Eigen::Index n) {
  std::ifstream in(path);
  if (!in) invalid("initial.file", "cannot read " + path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(col);
  }
  const auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    invalid("initial.file", "missing column '" + name + "' in " + path);
  };
  const std::size_t cR = column("R"), cQ = column("Q"), cu = column("u");
  FieldState s;
  s.R.resize(n);
  s.Q.resize(n);
  s.m.resize(n);
  Eigen::Index i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= n) invalid("initial.file", "more rows than grid cells in " + path);
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(parse_double("initial.file", cell));
    if (row.size() < header.size()) invalid("initial.file", "short row in " + path);
    s.R(i) = row[cR];
    s.Q(i) = row[cQ];
    s.m(i) = (row[cR] + row[cQ]) * row[cu];
    ++i;
  }
  if (i != n) invalid("initial.file", "row count does not match grid.n in " + path);
  return s;
}

}  // namespace

FieldState initial_state(const SimConfig& c, const std::string& base_dir) {
  const Grid1D grid = c.grid();
  const Eigen::Index n = grid.n();
  const double L = c.length;
  const double two_pi = 2.0 * std::numbers::pi;
  FieldState s;
  if (c.preset == "mms") {
    return MmsSolution(c.mms, c.exponents(), c.scheme().nu_eff(), L, c.derive_options().closure)
        .cell_averages(grid, 0.0);
  }
  if (c.preset == "from_file") {
    std::filesystem::path p(c.file);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    s = read_profile_file(p.string(), n);
  } else {
    s.R.resize(n);
    s.Q.resize(n);
    s.m.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = grid.center(i);
      double R = c.R0, Q = c.Q0, u = c.u0;
      if (c.preset == "gaussian_bump") {
        double d = x - c.center;
        if (c.bc == BoundaryCondition::Periodic) d -= L * std::round(d / L);
        const double bump = std::exp(-(d / c.width) * (d / c.width));
        R += c.amp_R * bump;
        Q += c.amp_Q * bump;
        u += c.amp_u * bump;
      } else if (c.preset == "sine") {
        const double phase = two_pi * double(c.wavenumber) * x / L;
        R += c.amp_R * std::sin(phase);
        Q += c.amp_Q * std::cos(phase);
        u += c.amp_u * std::sin(phase);
      }
      s.R(i) = R;
      s.Q(i) = Q;
      s.m(i) = (R + Q) * u;
    }
  }

  if (c.perturb_eps != 0.0) {
    // Relative perturbation of R and Q, additive for u; bounded by |eps|.
    std::array<double, 3> amp{1.0, 0.0, 0.0}, phase_R{0.0, 0.0, 0.0}, phase_Q{0.0, 0.0, 0.0};
    if (c.perturb_mode == "random") {
      std::mt19937_64 rng(c.seed);
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      std::uniform_real_distribution<double> angle(0.0, two_pi);
      for (std::size_t k = 0; k < amp.size(); ++k) {
        amp[k] = unit(rng) / 3.0;
        phase_R[k] = angle(rng);
        phase_Q[k] = angle(rng);
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = grid.center(i);
      double pR = 0.0, pQ = 0.0;
      for (std::size_t k = 0; k < amp.size(); ++k) {
        const double arg = two_pi * double(k + 1) * x / L;
        pR += amp[k] * std::sin(arg + phase_R[k]);
        pQ += amp[k] * std::cos(arg + phase_Q[k]);
      }
      const double rho = s.R(i) + s.Q(i);
      const double u = rho > 0.0 ? s.m(i) / rho : 0.0;
      s.R(i) *= 1.0 + c.perturb_eps * pR;
      s.Q(i) *= 1.0 + c.perturb_eps * pQ;
      s.m(i) = (s.R(i) + s.Q(i)) * (u + c.perturb_eps * pR);
    }
  }
  return s;
}

std::vector<std::string> admissibility_warnings(const SimConfig& c, const FieldState& init) {
  std::vector<std::string> w;
  const double gp = c.gamma_plus, gm = c.gamma_minus;
  if (gp < 9.0 / 5.0) {
    w.push_back("γ⁺ < 9/5: outside weak-existence hypothesis (gamma)");
  }
  // Data comparability a_lo R0 <= Q0 <= a_hi R0 with a finite a_hi.
  bool comparable = true;
  double ratio_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < init.size(); ++i) {
    if (init.R(i) == 0.0) {
      if (init.Q(i) > 0.0) comparable = false;
      continue;
    }
    ratio_min = std::min(ratio_min, init.Q(i) / init.R(i));
  }
  if (!comparable) {
    w.push_back(
        "initial data: Q0 > 0 where R0 = 0, no finite upper comparability constant: "
        "outside weak-existence hypothesis");
  }
  const bool a_lo_positive = comparable && ratio_min > 0.0 && std::isfinite(ratio_min);
  const auto bog = [](double g) { return std::min(2.0 / 3.0 * g - 1.0, g / 2.0); };
  const double G = a_lo_positive ? std::max(gp + bog(gp), gm + bog(gm)) : gp + bog(gp);
  const double Gamma_bar = a_lo_positive ? std::max(gp - gp / gm + 1.0, gm + gm / gp - 1.0)
                                         : std::max(gp - gp / gm + 1.0, gm + gm / gp - gp / gm);
  if (!(Gamma_bar < G)) {
    w.push_back("exponent compatibility Γ̄ < G fails (Γ̄ = " + format_double(Gamma_bar) +
                ", G = " + format_double(G) + "): outside weak-existence hypothesis");
  }
  return w;
}

std::shared_ptr<const MmsSolution> make_forcing(const SimConfig& c) {
  if (!c.forced()) return nullptr;
  return std::make_shared<MmsSolution>(c.mms, c.exponents(), c.scheme().nu_eff(), c.length,
                                       c.derive_options().closure);
}

Solver make_solver(const SimConfig& c) {
  return Solver(c.grid(), c.exponents(), c.scheme(), c.derive_options(), make_forcing(c));
}

}  // namespace twofluid
