#include "twofluid/verify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "twofluid/thermo.hpp"

namespace twofluid {

RERow relative_entropy(const Grid1D& grid, const FieldState& a, const DerivedFields& da,
                       const FieldState& b, const DerivedFields& db, const Exponents& exps,
                       double nu) {
  const Eigen::Index n = grid.n();
  if (a.size() != n || b.size() != n || da.size() != n || db.size() != n) {
    throw Error(ErrorKind::GridMismatch, "relative entropy needs both states on one grid");
  }
  if (db.vacuum.any()) {
    throw Error(ErrorKind::VacuumReference, "reference state has vacuum cells");
  }
  const PhaseLaw<double> plus(exps.gamma_plus());
  const PhaseLaw<double> minus(exps.gamma_minus());
  const double dx = grid.dx();
  RERow row;
  row.t = a.t;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double du = da.u(i) - db.u(i);
    const double dalpha = da.alpha(i) - db.alpha(i);
    row.E_kin += 0.5 * (a.R(i) + a.Q(i)) * du * du * dx;
    row.E_alpha += 0.5 * dalpha * dalpha * dx;
    row.E_breg_plus += da.alpha(i) * bregman(da.rho_plus(i), db.rho_plus(i), plus) * dx;
    row.E_breg_minus +=
        da.one_minus_alpha(i) * bregman(da.rho_minus(i), db.rho_minus(i), minus) * dx;
  }
  row.E_total = row.E_kin + row.E_alpha + row.E_breg_plus + row.E_breg_minus;
  if (nu > 0.0) row.D = dissipation_rate(da.u - db.u, grid, nu);
  return row;
}

RERow relative_entropy(const Grid1D& grid, const Snapshot& a, const Snapshot& b,
                       const Exponents& exps, double nu) {
  return relative_entropy(grid, a.state, a.derived, b.state, b.derived, exps, nu);
}

namespace {

void require_aligned(const Trajectory& a, const Trajectory& b) {
  if (!(a.grid == b.grid)) throw Error(ErrorKind::GridMismatch, "trajectories use different grids");
  if (a.snapshots.size() != b.snapshots.size()) {
    throw Error(ErrorKind::TimeGridMismatch, "trajectories have different snapshot counts");
  }
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    if (a.snapshots[k].state.t != b.snapshots[k].state.t) {
      throw Error(ErrorKind::TimeGridMismatch,
                  "snapshot " + std::to_string(k) + " times differ: " +
                      std::to_string(a.snapshots[k].state.t) + " vs " +
                      std::to_string(b.snapshots[k].state.t));
    }
  }
}

}  // namespace

std::vector<RERow> relative_entropy_series(const Trajectory& run, const Trajectory& reference,
                                           const Exponents& exps, double nu) {
  require_aligned(run, reference);
  std::vector<RERow> out;
  out.reserve(run.snapshots.size());
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    out.push_back(relative_entropy(run.grid, run.snapshots[k], reference.snapshots[k], exps, nu));
  }
  return out;
}

Trajectory restrict_trajectory(const Trajectory& fine, const Grid1D& coarse,
                               const Exponents& exps, const DeriveOptions& opts) {
  if (fine.grid.n() % coarse.n() != 0 || fine.grid.length() != coarse.length() ||
      fine.grid.bc() != coarse.bc()) {
    throw Error(ErrorKind::GridMismatch, "fine grid does not nest in the coarse grid");
  }
  const Eigen::Index factor = fine.grid.n() / coarse.n();
  Trajectory out{coarse, {}, {}, 0, 0, 0, 0, 0.0, fine.forced};
  for (const Snapshot& s : fine.snapshots) {
    Snapshot c;
    c.state = restrict_average(s.state, factor);
    c.derived = derive(c.state, exps, opts);
    c.energy = total_energy(c.derived, c.state, coarse, exps);
    c.dissipation = s.dissipation;
    if (s.alpha_transported.size() > 0) {
      c.alpha_transported.resize(coarse.n());
      for (Eigen::Index i = 0; i < coarse.n(); ++i) {
        c.alpha_transported(i) = s.alpha_transported.segment(i * factor, factor).mean();
      }
    }
    out.snapshots.push_back(std::move(c));
  }
  return out;
}

Trajectory mms_reference_trajectory(const MmsSolution& mms, const Trajectory& like,
                                    const Exponents& exps, const DeriveOptions& opts) {
  Trajectory out{like.grid, {}, {}, 0, 0, 0, 0, 0.0, true};
  for (const Snapshot& s : like.snapshots) {
    Snapshot c;
    c.state = mms.cell_averages(like.grid, s.state.t);
    c.derived = derive(c.state, exps, opts);
    c.energy = total_energy(c.derived, c.state, like.grid, exps);
    out.snapshots.push_back(std::move(c));
  }
  return out;
}

EnergyAudit energy_audit(const Trajectory& traj, double eps_E) {
  EnergyAudit audit;
  audit.eps = eps_E;
  for (const Snapshot& s : traj.snapshots) {
    audit.times.push_back(s.state.t);
    audit.energy.push_back(s.energy);
    audit.dissipation.push_back(s.dissipation);
  }
  if (traj.forced) {
    audit.skipped = true;
    audit.note = "forced run: sources inject energy, inequality not applicable";
    return audit;
  }
  if (traj.snapshots.size() < 2) {
    audit.skipped = true;
    audit.note = "fewer than two snapshots";
    return audit;
  }
  const double e0 = traj.snapshots.front().energy;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const double lhs = audit.energy[k] + audit.dissipation[k];
    const double margin = e0 > 0.0 ? lhs / e0 - 1.0 : lhs;
    audit.worst_margin = std::max(audit.worst_margin, margin);
    if (lhs > e0 * (1.0 + eps_E)) audit.passed = false;
  }
  return audit;
}

GronwallFit gronwall_check(const std::vector<double>& times, const std::vector<double>& E,
                           double e0_floor, double noise_threshold) {
  if (E.empty() || times.size() != E.size()) {
    throw Error(ErrorKind::EmptySeries, "Gronwall check needs a non-empty aligned series");
  }
  GronwallFit fit;
  fit.max_E = *std::max_element(E.begin(), E.end());
  fit.at_noise_floor = fit.max_E <= noise_threshold;
  const double e0 = E.front();
  if (!(e0 >= e0_floor) || e0 <= 0.0) {
    fit.identical_data = true;
    return fit;
  }
  fit.C_fit = fit.max_E / e0;
  double sty = 0.0, stt = 0.0;
  for (std::size_t k = 0; k < E.size(); ++k) {
    if (!(E[k] > noise_threshold)) continue;
    const double dt = times[k] - times.front();
    sty += dt * std::log(E[k] / e0);
    stt += dt * dt;
    ++fit.fitted_points;
  }
  fit.C_exp_fit = stt > 0.0 ? sty / stt : 0.0;
  return fit;
}

GronwallFit gronwall_check(const std::vector<RERow>& series, double e0_floor,
                           double noise_threshold) {
  std::vector<double> t, e;
  for (const RERow& r : series) {
    t.push_back(r.t);
    e.push_back(r.E_total);
  }
  return gronwall_check(t, e, e0_floor, noise_threshold);
}

double w12_norm_squared(const Vector& f, const Grid1D& grid) {
  const Eigen::Index n = f.size();
  const double dx = grid.dx();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    sum += dx * f(i) * f(i);
    if (grid.bc() == BoundaryCondition::Periodic || i + 1 < n) {
      const double diff = (f((i + 1) % n) - f(i)) / dx;
      sum += dx * diff * diff;
    }
  }
  return sum;
}

AlphaStabilityReport alpha_stability_check(const std::vector<double>& times,
                                           const std::vector<Vector>& alpha,
                                           const std::vector<Vector>& beta,
                                           const std::vector<Vector>& u,
                                           const std::vector<Vector>& v, const Grid1D& grid,
                                           double delta) {
  const std::size_t K = times.size();
  if (K == 0 || alpha.size() != K || beta.size() != K || u.size() != K || v.size() != K) {
    throw Error(ErrorKind::EmptySeries, "alpha stability check needs aligned non-empty series");
  }
  AlphaStabilityReport rep;
  rep.delta = delta;
  const double dx = grid.dx();
  std::vector<double> A(K), W(K);
  for (std::size_t k = 0; k < K; ++k) {
    A[k] = (alpha[k] - beta[k]).square().sum() * dx;
    W[k] = w12_norm_squared(v[k] - u[k], grid);
  }
  double vel_integral = 0.0;
  double a_integral = 0.0;
  for (std::size_t k = 1; k < K; ++k) {
    const double dt = times[k] - times[k - 1];
    vel_integral += dt * W[k - 1];
    a_integral += dt * A[k - 1];
    const double excess = A[k] - A[0] - delta * vel_integral;
    rep.max_growth = std::max(rep.max_growth, A[k] - A[0]);
    if (excess <= 0.0) continue;
    if (a_integral > 0.0) {
      rep.C_delta = std::max(rep.C_delta, excess / a_integral);
    } else {
      rep.C_delta = std::numeric_limits<double>::infinity();
      rep.finite = false;
    }
  }
  return rep;
}

AlphaStabilityReport alpha_stability_check(const Trajectory& run, const Trajectory& reference,
                                           double delta) {
  require_aligned(run, reference);
  std::vector<double> t;
  std::vector<Vector> a, b, u, v;
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    t.push_back(run.snapshots[k].state.t);
    a.push_back(run.snapshots[k].derived.alpha);
    b.push_back(reference.snapshots[k].derived.alpha);
    u.push_back(run.snapshots[k].derived.u);
    v.push_back(reference.snapshots[k].derived.u);
  }
  return alpha_stability_check(t, a, b, u, v, run.grid, delta);
}

CoercivityReport coercivity_check(const Grid1D& grid, const FieldState& a,
                                  const DerivedFields& da, const FieldState& b,
                                  const DerivedFields& db, const Exponents& exps, double c_star,
                                  double c_star_upper) {
  const RERow row = relative_entropy(grid, a, da, b, db, exps);
  const EssentialMask mask = classify_ess_res(da, c_star, c_star_upper);
  CoercivityReport rep;
  rep.E_bar = row.reduced();
  rep.c_star = c_star;
  rep.c_star_upper = c_star_upper;
  rep.n_essential = mask.n_essential;
  rep.n_residual = mask.n_residual;
  const double dx = grid.dx();
  for (Eigen::Index i = 0; i < grid.n(); ++i) {
    const double w = da.alpha(i);
    const double w_c = da.one_minus_alpha(i);
    if (mask.essential(i)) {
      const double dp = da.rho_plus(i) - db.rho_plus(i);
      const double dm = da.rho_minus(i) - db.rho_minus(i);
      rep.rhs_essential += (w * dp * dp + w_c * dm * dm) * dx;
    } else {
      rep.rhs_residual += (1.0 + w * std::pow(da.rho_plus(i), exps.gamma_plus()) +
                           w_c * std::pow(da.rho_minus(i), exps.gamma_minus())) *
                          dx;
    }
  }
  const double rhs = rep.rhs_essential + rep.rhs_residual;
  if (rhs > 0.0) rep.C_lb = rep.E_bar / rhs;
  return rep;
}

double ConvergenceReport::min_order() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto* orders : {&order_R, &order_Q, &order_u}) {
    for (double o : *orders) {
      if (!std::isfinite(o)) return std::numeric_limits<double>::quiet_NaN();
      m = std::min(m, o);
    }
  }
  return m;
}

bool ConvergenceReport::passes(double threshold) const {
  const double m = min_order();
  return std::isfinite(m) && m >= threshold;
}

double l2_norm(const Vector& f, const Grid1D& grid) {
  return std::sqrt(f.square().sum() * grid.dx());
}

ConvergenceReport convergence_study(const MmsStudySpec& spec, int levels) {
  if (levels < 3) {
    throw Error(ErrorKind::ValidationError, "convergence study needs at least 3 levels");
  }
  ConvergenceReport rep;
  auto mms = std::make_shared<MmsSolution>(spec.mms, spec.exps, spec.scheme.nu_eff(),
                                           spec.length, spec.derive.closure);
  for (int level = 0; level < levels; ++level) {
    const Eigen::Index n = spec.n0 << level;
    const Grid1D grid(n, spec.length, BoundaryCondition::Periodic);
    const Solver solver(grid, spec.exps, spec.scheme, spec.derive, mms);
    RunOptions opts;
    opts.t_end = spec.t_end;
    opts.alpha_diagnostic = false;
    rep.n.push_back(n);
    try {
      const Trajectory traj = run(solver, mms->cell_averages(grid, 0.0), opts);
      const Snapshot& last = traj.back();
      const FieldState exact = mms->cell_averages(grid, spec.t_end);
      const DerivedFields exact_derived = solver.derive(exact);
      rep.err_R.push_back(l2_norm(last.state.R - exact.R, grid));
      rep.err_Q.push_back(l2_norm(last.state.Q - exact.Q, grid));
      rep.err_u.push_back(l2_norm(last.derived.u - exact_derived.u, grid));
    } catch (const Error&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      rep.err_R.push_back(nan);
      rep.err_Q.push_back(nan);
      rep.err_u.push_back(nan);
    }
  }
  const auto order = [](double coarse, double fine) { return std::log2(coarse / fine); };
  for (std::size_t k = 1; k < rep.n.size(); ++k) {
    rep.order_R.push_back(order(rep.err_R[k - 1], rep.err_R[k]));
    rep.order_Q.push_back(order(rep.err_Q[k - 1], rep.err_Q[k]));
    rep.order_u.push_back(order(rep.err_u[k - 1], rep.err_u[k]));
  }
  return rep;
}

}  // namespace twofluid
