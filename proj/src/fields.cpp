#include "twofluid/fields.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "twofluid/thermo.hpp"

namespace twofluid {

const char* to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Periodic ? "periodic" : "noslip";
}

Grid1D::Grid1D(Eigen::Index n, double length, BoundaryCondition bc)
    : n_(n), length_(length), dx_(length / double(n)), bc_(bc) {
  if (n < 4) throw Error(ErrorKind::ValidationError, "grid needs at least 4 cells");
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error(ErrorKind::ValidationError, "grid length must be positive");
  }
}

Vector Grid1D::centers() const {
  Vector x(n_);
  for (Eigen::Index i = 0; i < n_; ++i) x(i) = center(i);
  return x;
}

FieldState FieldState::uniform(Eigen::Index n, double R, double Q, double u) {
  FieldState s;
  s.R = Vector::Constant(n, R);
  s.Q = Vector::Constant(n, Q);
  s.m = Vector::Constant(n, (R + Q) * u);
  return s;
}

ClosureState<double> DerivedFields::cell(Eigen::Index i) const {
  ClosureState<double> c;
  c.Z = Z(i);
  c.alpha = alpha(i);
  c.one_minus_alpha = one_minus_alpha(i);
  c.rho_plus = rho_plus(i);
  c.rho_minus = rho_minus(i);
  c.p = p(i);
  c.vacuum_flag = vacuum(i);
  return c;
}

DerivedFields derive(const FieldState& state, const Exponents& exps,
                     const DeriveOptions& opts) {
  const Eigen::Index n = state.size();
  if (state.Q.size() != n || state.m.size() != n) {
    throw Error(ErrorKind::GridMismatch, "field arrays have inconsistent lengths");
  }
  DerivedFields d;
  d.Z.resize(n);
  d.alpha.resize(n);
  d.one_minus_alpha.resize(n);
  d.rho_plus.resize(n);
  d.rho_minus.resize(n);
  d.p.resize(n);
  d.vacuum.resize(n);
  d.u.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ClosureState<double> c;
    try {
      c = recover_state(state.R(i), state.Q(i), exps, opts.closure);
    } catch (const Error& e) {
      throw Error(e.kind(), "cell " + std::to_string(i) + ": " + e.what(), i, state.t);
    }
    d.Z(i) = c.Z;
    d.alpha(i) = c.alpha;
    d.one_minus_alpha(i) = c.one_minus_alpha;
    d.rho_plus(i) = c.rho_plus;
    d.rho_minus(i) = c.rho_minus;
    d.p(i) = c.p;
    d.vacuum(i) = c.vacuum_flag;
    d.max_iterations = std::max(d.max_iterations, c.iterations);
    const double rho = state.R(i) + state.Q(i);
    d.u(i) = state.m(i) == 0.0 ? 0.0 : state.m(i) / std::max(rho, opts.density_floor);
  }
  return d;
}

TotalMass total_mass(const FieldState& state, const Grid1D& grid) {
  TotalMass m;
  const double dx = grid.dx();
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    m.R += state.R(i) * dx;
    m.Q += state.Q(i) * dx;
  }
  return m;
}

double total_energy(const DerivedFields& d, const FieldState& state, const Grid1D& grid,
                    const Exponents& exps) {
  const PhaseLaw<double> plus(exps.gamma_plus());
  const PhaseLaw<double> minus(exps.gamma_minus());
  const double dx = grid.dx();
  double e = 0.0;
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const double rho = state.R(i) + state.Q(i);
    double cell = 0.5 * rho * d.u(i) * d.u(i);
    if (!d.vacuum(i)) {
      cell += d.alpha(i) * helmholtz(d.rho_plus(i), plus) +
              d.one_minus_alpha(i) * helmholtz(d.rho_minus(i), minus);
    }
    e += cell * dx;
  }
  return e;
}

double total_energy(const FieldState& state, const Grid1D& grid, const Exponents& exps,
                    const DeriveOptions& opts) {
  return total_energy(derive(state, exps, opts), state, grid, exps);
}

EssentialMask classify_ess_res(const DerivedFields& d, double c_star, double c_star_upper) {
  if (!(c_star > 0.0) || !(c_star < c_star_upper)) {
    throw Error(ErrorKind::ValidationError, "essential window needs 0 < c_star < c_star_upper");
  }
  EssentialMask mask;
  mask.c_star = c_star;
  mask.c_star_upper = c_star_upper;
  mask.essential.resize(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const bool ess = d.rho_plus(i) >= c_star && d.rho_plus(i) <= c_star_upper &&
                     d.rho_minus(i) >= c_star && d.rho_minus(i) <= c_star_upper;
    mask.essential(i) = ess;
    ++(ess ? mask.n_essential : mask.n_residual);
  }
  return mask;
}

std::pair<double, double> default_essential_window(const DerivedFields& reference) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Eigen::Index i = 0; i < reference.size(); ++i) {
    if (reference.vacuum(i)) continue;
    lo = std::min({lo, reference.rho_plus(i), reference.rho_minus(i)});
    hi = std::max({hi, reference.rho_plus(i), reference.rho_minus(i)});
  }
  if (!(hi > 0.0)) throw Error(ErrorKind::VacuumReference, "reference is entirely vacuum");
  return {0.5 * lo, 2.0 * hi};
}

namespace {

void append_g17(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

}  // namespace

void write_snapshot_csv(std::ostream& out, const FieldState& s, const DerivedFields& d,
                        const Grid1D& grid) {
  out << "i,x,R,Q,m,Z,alpha,rho_plus,rho_minus,p,u\n";
  std::string line;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    line = std::to_string(i);
    for (double v : {grid.center(i), s.R(i), s.Q(i), s.m(i), d.Z(i), d.alpha(i),
                     d.rho_plus(i), d.rho_minus(i), d.p(i), d.u(i)}) {
      line += ',';
      append_g17(line, v);
    }
    line += '\n';
    out << line;
  }
}

void write_snapshot_csv(const std::string& path, const FieldState& state,
                        const DerivedFields& derived, const Grid1D& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ValidationError, "cannot open " + path + " for writing");
  write_snapshot_csv(out, state, derived, grid);
}

FieldState read_snapshot_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open snapshot " + path);
  std::string line;
  std::getline(in, line);
  std::vector<double> R, Q, m;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 5) throw Error(ErrorKind::ParseError, "short snapshot row in " + path);
    R.push_back(row[2]);
    Q.push_back(row[3]);
    m.push_back(row[4]);
  }
  FieldState s;
  s.R = Eigen::Map<const Vector>(R.data(), Eigen::Index(R.size()));
  s.Q = Eigen::Map<const Vector>(Q.data(), Eigen::Index(Q.size()));
  s.m = Eigen::Map<const Vector>(m.data(), Eigen::Index(m.size()));
  return s;
}

FieldState restrict_average(const FieldState& fine, Eigen::Index factor) {
  if (factor < 1 || fine.size() % factor != 0) {
    throw Error(ErrorKind::GridMismatch, "fine grid does not nest in the coarse grid");
  }
  const Eigen::Index n = fine.size() / factor;
  FieldState c;
  c.t = fine.t;
  c.R.resize(n);
  c.Q.resize(n);
  c.m.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c.R(i) = fine.R.segment(i * factor, factor).sum() / double(factor);
    c.Q(i) = fine.Q.segment(i * factor, factor).sum() / double(factor);
    c.m(i) = fine.m.segment(i * factor, factor).sum() / double(factor);
  }
  return c;
}

}  // namespace twofluid
