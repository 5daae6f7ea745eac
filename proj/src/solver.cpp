#include "twofluid/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace twofluid {

const char* to_string(TimeIntegrator ti) {
  return ti == TimeIntegrator::ForwardEuler ? "euler" : "ssprk2";
}

namespace {

struct FaceNeighbours {
  Eigen::Index left;
  Eigen::Index right;
  bool wall;
};

FaceNeighbours neighbours(Eigen::Index f, const Grid1D& grid) {
  const Eigen::Index n = grid.n();
  if (grid.bc() == BoundaryCondition::Periodic) {
    return {(f - 1 + n) % n, f % n, false};
  }
  if (f == 0) return {0, 0, true};
  if (f == n) return {n - 1, n - 1, true};
  return {f - 1, f, false};
}

}  // namespace

Vector face_velocities(const Vector& u, const Grid1D& grid) {
  const Eigen::Index n = grid.n();
  Vector uf(n + 1);
  for (Eigen::Index f = 0; f <= n; ++f) {
    const FaceNeighbours nb = neighbours(f, grid);
    uf(f) = nb.wall ? 0.0 : 0.5 * (u(nb.left) + u(nb.right));
  }
  return uf;
}

Vector velocity_divergence(const Vector& u, const Grid1D& grid) {
  const Vector uf = face_velocities(u, grid);
  return (uf.tail(grid.n()) - uf.head(grid.n())) / grid.dx();
}

double dissipation_rate(const Vector& u, const Grid1D& grid, double nu) {
  const Eigen::Index n = grid.n();
  const double dx = grid.dx();
  double sum = 0.0;
  // Face n duplicates face 0 on periodic grids.
  const Eigen::Index last = grid.bc() == BoundaryCondition::Periodic ? n - 1 : n;
  for (Eigen::Index f = 0; f <= last; ++f) {
    const FaceNeighbours nb = neighbours(f, grid);
    if (nb.wall) {
      const double grad = u(nb.left) / (0.5 * dx);
      sum += 0.5 * dx * nu * grad * grad;
    } else {
      const double grad = (u(nb.right) - u(nb.left)) / dx;
      sum += dx * nu * grad * grad;
    }
  }
  return sum;
}

AlphaStepResult alpha_diagnostic_step(const Vector& alpha, const Vector& u,
                                      const Vector& div_u, double gamma, double dt,
                                      const Grid1D& grid) {
  const Eigen::Index n = grid.n();
  const double dx = grid.dx();
  const bool periodic = grid.bc() == BoundaryCondition::Periodic;
  AlphaStepResult out;
  out.alpha.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index im = periodic ? (i - 1 + n) % n : std::max<Eigen::Index>(i - 1, 0);
    const Eigen::Index ip = periodic ? (i + 1) % n : std::min<Eigen::Index>(i + 1, n - 1);
    const double grad = u(i) >= 0.0 ? (alpha(i) - alpha(im)) / dx : (alpha(ip) - alpha(i)) / dx;
    double next = alpha(i) - dt * (u(i) * grad + omega_of_alpha(alpha(i), gamma) * div_u(i));
    if (next < 0.0 || next > 1.0) {
      next = std::clamp(next, 0.0, 1.0);
      ++out.clamps;
    }
    out.alpha(i) = next;
  }
  return out;
}

Solver::Solver(Grid1D grid, Exponents exps, SchemeConfig scheme, DeriveOptions derive,
               std::shared_ptr<const Forcing> forcing)
    : grid_(grid), exps_(exps), scheme_(scheme), derive_(derive), forcing_(std::move(forcing)) {
  if (!(scheme_.cfl > 0.0) || scheme_.cfl > 1.0) {
    throw Error(ErrorKind::ValidationError, "cfl must lie in (0, 1]");
  }
  if (scheme_.mu < 0.0 || 2.0 * scheme_.mu + 3.0 * scheme_.lambda < 0.0) {
    throw Error(ErrorKind::ValidationError, "viscosities need mu >= 0 and 2 mu + 3 lambda >= 0");
  }
}

DerivedFields Solver::derive(const FieldState& state) const {
  return twofluid::derive(state, exps_, derive_);
}

namespace {

// Largest of the pressure-law speed sqrt(gp Z^(gp-1)) and the mixture speed
// sqrt(dp/drho at fixed mass ratio) = sqrt(gp p / (D rho)), D = gamma(1-alpha)+alpha.
double sound_speed(const DerivedFields& d, Eigen::Index i, const Exponents& exps, double rho) {
  const double gp = exps.gamma_plus();
  const double c_law = std::sqrt(gp * std::pow(d.Z(i), gp - 1.0));
  const double D = exps.gamma() * d.one_minus_alpha(i) + d.alpha(i);
  const double c_mix = rho > 0.0 ? std::sqrt(gp * d.p(i) / (D * rho)) : 0.0;
  return std::max(c_law, c_mix);
}

}  // namespace

double Solver::max_wave_speed(const DerivedFields& d) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d.vacuum(i)) continue;
    const double rho = d.alpha(i) * d.rho_plus(i) + d.one_minus_alpha(i) * d.rho_minus(i);
    s = std::max(s, std::abs(d.u(i)) + sound_speed(d, i, exps_, rho));
  }
  return s;
}

double Solver::compute_dt(const FieldState& state, const DerivedFields& d) const {
  const double dx = grid_.dx();
  const double nu = scheme_.nu_eff();
  double dt = std::numeric_limits<double>::infinity();
  bool any = false;
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    if (d.vacuum(i)) continue;
    any = true;
    const double rho = state.R(i) + state.Q(i);
    const double speed = std::abs(d.u(i)) + sound_speed(d, i, exps_, rho);
    if (speed > 0.0) dt = std::min(dt, dx / speed);
    if (nu > 0.0) dt = std::min(dt, dx * dx * rho / (2.0 * nu));
  }
  if (!any || !std::isfinite(dt) || !(dt > 0.0)) {
    throw Error(ErrorKind::ZeroDt, "no admissible time step (vacuum state)", Error::kNoCell,
                state.t);
  }
  return scheme_.cfl * dt;
}

void Solver::rhs(const FieldState& s, const DerivedFields& d, double t, Vector& dR, Vector& dQ,
                 Vector& dm) const {
  const Eigen::Index n = grid_.n();
  const double dx = grid_.dx();
  const double nu = scheme_.nu_eff();
  Vector FR(n + 1), FQ(n + 1), Fm(n + 1);
  for (Eigen::Index f = 0; f <= n; ++f) {
    const FaceNeighbours nb = neighbours(f, grid_);
    if (nb.wall) {
      // Zero mass and convective flux; wall pressure and viscous stress only.
      const double sign = f == 0 ? 1.0 : -1.0;
      FR(f) = 0.0;
      FQ(f) = 0.0;
      Fm(f) = d.p(nb.left) - nu * sign * d.u(nb.left) / (0.5 * dx);
      continue;
    }
    const Eigen::Index l = nb.left;
    const Eigen::Index r = nb.right;
    const double uf = 0.5 * (d.u(l) + d.u(r));
    FR(f) = uf >= 0.0 ? uf * s.R(l) : uf * s.R(r);
    FQ(f) = uf >= 0.0 ? uf * s.Q(l) : uf * s.Q(r);
    const double um = scheme_.flux_sign_defect ? -uf : uf;
    const double conv = um >= 0.0 ? um * s.m(l) : um * s.m(r);
    const double pf = 0.5 * (d.p(l) + d.p(r));
    const double visc = nu * (d.u(r) - d.u(l)) / dx;
    Fm(f) = conv + pf - visc;
  }
  dR = -(FR.tail(n) - FR.head(n)) / dx;
  dQ = -(FQ.tail(n) - FQ.head(n)) / dx;
  dm = -(Fm.tail(n) - Fm.head(n)) / dx;
  if (forcing_) {
    Vector sR = Vector::Zero(n), sQ = Vector::Zero(n), sm = Vector::Zero(n);
    forcing_->source(t, grid_, sR, sQ, sm);
    dR += sR;
    dQ += sQ;
    dm += sm;
  }
}

FieldState Solver::advance(const FieldState& base, const Vector& dR, const Vector& dQ,
                           const Vector& dm, double dt, int& clips) const {
  FieldState next;
  next.t = base.t + dt;
  next.R = base.R + dt * dR;
  next.Q = base.Q + dt * dQ;
  next.m = base.m + dt * dm;
  for (Eigen::Index i = 0; i < next.size(); ++i) {
    for (double* v : {&next.R(i), &next.Q(i)}) {
      if (*v >= 0.0) continue;
      if (scheme_.strict && *v < -scheme_.positivity_tol) {
        throw Error(ErrorKind::PositivityLoss,
                    "partial mass became negative (" + std::to_string(*v) + ") in cell " +
                        std::to_string(i) + " at t=" + std::to_string(base.t),
                    i, base.t);
      }
      *v = 0.0;
      ++clips;
    }
  }
  return next;
}

StepResult Solver::step(const FieldState& state, const DerivedFields& derived, double dt) const {
  const Eigen::Index n = grid_.n();
  if (state.size() != n) throw Error(ErrorKind::GridMismatch, "state does not match grid");
  StepResult out;
  out.report.dt = dt;
  out.report.max_wave_speed = max_wave_speed(derived);

  Vector dR(n), dQ(n), dm(n);
  rhs(state, derived, state.t, dR, dQ, dm);
  int clips = 0;
  FieldState stage = advance(state, dR, dQ, dm, dt, clips);
  DerivedFields stage_derived = derive(stage);

  if (scheme_.integrator == TimeIntegrator::SSPRK2) {
    rhs(stage, stage_derived, stage.t, dR, dQ, dm);
    FieldState second = advance(stage, dR, dQ, dm, dt, clips);
    stage.R = 0.5 * (state.R + second.R);
    stage.Q = 0.5 * (state.Q + second.Q);
    stage.m = 0.5 * (state.m + second.m);
    stage.t = state.t + dt;
    out.report.closure_iterations = stage_derived.max_iterations;
    stage_derived = derive(stage);
  }
  out.report.clips = clips;
  out.report.closure_iterations =
      std::max(out.report.closure_iterations, stage_derived.max_iterations);
  out.state = std::move(stage);
  out.derived = std::move(stage_derived);
  return out;
}

std::vector<double> snapshot_times(double t_end, double interval) {
  std::vector<double> times;
  if (interval > 0.0) {
    for (std::size_t k = 1;; ++k) {
      const double t = double(k) * interval;
      if (t >= t_end * (1.0 - 1e-12)) break;
      times.push_back(t);
    }
  }
  if (t_end > 0.0) times.push_back(t_end);
  return times;
}

Trajectory run(const Solver& solver, const FieldState& initial, const RunOptions& opts) {
  const Grid1D& grid = solver.grid();
  if (initial.size() != grid.n()) {
    throw Error(ErrorKind::GridMismatch, "initial state does not match grid");
  }
  if (!(opts.t_end >= 0.0)) throw Error(ErrorKind::ValidationError, "t_end must be >= 0");
  const double nu = solver.scheme().nu_eff();
  const double gamma = solver.exponents().gamma();

  Trajectory traj{grid, {}, {}, 0, 0, 0, 0, 0.0, solver.forced()};
  FieldState state = initial;
  DerivedFields derived = solver.derive(state);
  traj.max_closure_iterations = derived.max_iterations;
  Vector alpha = opts.alpha_diagnostic ? derived.alpha : Vector();
  double dissipation = 0.0;

  const auto record = [&]() {
    Snapshot snap;
    snap.state = state;
    snap.derived = derived;
    snap.alpha_transported = alpha;
    snap.energy = total_energy(derived, state, grid, solver.exponents());
    snap.dissipation = dissipation;
    traj.snapshots.push_back(std::move(snap));
  };
  record();

  for (double target : snapshot_times(opts.t_end, opts.snapshot_interval)) {
    while (state.t < target) {
      if (traj.steps >= opts.max_steps) {
        throw Error(ErrorKind::MaxIterExceeded, "step budget exhausted", Error::kNoCell,
                    state.t);
      }
      double dt = solver.compute_dt(state, derived);
      bool lands = false;
      if (state.t + dt >= target * (1.0 - 1e-14)) {
        dt = target - state.t;
        lands = true;
      }
      const double rate = dissipation_rate(derived.u, grid, nu);
      StepResult next;
      try {
        next = solver.step(state, derived, dt);
      } catch (const Error& e) {
        throw Error(e.kind(), std::string(e.what()) + " (t=" + std::to_string(state.t) + ")",
                    e.cell(), state.t);
      }
      if (opts.alpha_diagnostic) {
        const Vector div_u = velocity_divergence(derived.u, grid);
        AlphaStepResult a = alpha_diagnostic_step(alpha, derived.u, div_u, gamma, dt, grid);
        alpha = std::move(a.alpha);
        traj.alpha_clamps += a.clamps;
      }
      dissipation += dt * rate;
      state = std::move(next.state);
      derived = std::move(next.derived);
      if (lands) state.t = target;
      traj.steps += 1;
      traj.clips += next.report.clips;
      traj.max_closure_iterations =
          std::max(traj.max_closure_iterations, next.report.closure_iterations);
      traj.max_wave_speed = std::max(traj.max_wave_speed, next.report.max_wave_speed);
      traj.dt_series.push_back(dt);
    }
    record();
  }
  return traj;
}

}  // namespace twofluid
