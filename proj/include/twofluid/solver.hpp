#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "twofluid/fields.hpp"

namespace twofluid {

enum class TimeIntegrator { ForwardEuler, SSPRK2 };
enum class FluxScheme { Upwind };

const char* to_string(TimeIntegrator ti);

struct SchemeConfig {
  double cfl = 0.5;
  double mu = 0.1;
  double lambda = 0.0;
  TimeIntegrator integrator = TimeIntegrator::ForwardEuler;
  FluxScheme flux = FluxScheme::Upwind;
  /// Hard-fail on negative partial masses; otherwise clip to zero and count.
  bool strict = true;
  double positivity_tol = 0.0;
  /// Negative-control fixture: the convective momentum flux transports with
  /// -u. Never set in production configs.
  bool flux_sign_defect = false;

  /// 1D effective viscosity 2 mu + lambda.
  double nu_eff() const { return 2.0 * mu + lambda; }
};

/// Cell-averaged source terms added to the right-hand side at time t.
class Forcing {
 public:
  virtual ~Forcing() = default;
  virtual void source(double t, const Grid1D& grid, Vector& sR, Vector& sQ,
                      Vector& sm) const = 0;
};

struct StepReport {
  double dt = 0.0;
  double max_wave_speed = 0.0;
  int clips = 0;
  int closure_iterations = 0;
};

struct StepResult {
  FieldState state;
  DerivedFields derived;
  StepReport report;
};

struct AlphaStepResult {
  Vector alpha;
  int clamps = 0;
};

/// Face velocities, n+1 entries; face f sits between cells f-1 and f.
/// Periodic grids repeat face 0 as face n; no-slip walls carry u = 0.
Vector face_velocities(const Vector& u, const Grid1D& grid);

/// Cell divergence (u_{i+1/2} - u_{i-1/2}) / dx from face velocities.
Vector velocity_divergence(const Vector& u, const Grid1D& grid);

/// Sum over faces of dx * nu * (du/dx)^2, the discrete viscous dissipation
/// rate. No-slip wall faces use the half-cell gradient and half weight.
double dissipation_rate(const Vector& u, const Grid1D& grid, double nu);

/// Explicit update of d_t alpha + u d_x alpha + omega(alpha) div u = 0 with
/// upwind advection; the result is clamped to [0, 1] and clamps are counted.
AlphaStepResult alpha_diagnostic_step(const Vector& alpha, const Vector& u,
                                      const Vector& div_u, double gamma, double dt,
                                      const Grid1D& grid);

/// First-order finite-volume discretization of
///   d_t R + d_x(R u) = 0,  d_t Q + d_x(Q u) = 0,
///   d_t m + d_x(m u) + d_x Z^gp = d_x(nu_eff d_x u),   m = (R+Q) u,
/// on a collocated grid with the closure re-solved after every stage.
class Solver {
 public:
  Solver(Grid1D grid, Exponents exps, SchemeConfig scheme, DeriveOptions derive = {},
         std::shared_ptr<const Forcing> forcing = nullptr);

  const Grid1D& grid() const { return grid_; }
  const Exponents& exponents() const { return exps_; }
  const SchemeConfig& scheme() const { return scheme_; }
  const DeriveOptions& derive_options() const { return derive_; }
  bool forced() const { return forcing_ != nullptr; }

  DerivedFields derive(const FieldState& state) const;

  /// cfl * min_i min(dx / (|u_i| + c_i), rho_i dx^2 / (2 nu_eff)).
  double compute_dt(const FieldState& state, const DerivedFields& derived) const;
  double max_wave_speed(const DerivedFields& derived) const;

  StepResult step(const FieldState& state, const DerivedFields& derived, double dt) const;

  /// Right-hand side L(U) of dU/dt = L(U) at time t.
  void rhs(const FieldState& state, const DerivedFields& derived, double t, Vector& dR,
           Vector& dQ, Vector& dm) const;

 private:
  FieldState advance(const FieldState& base, const Vector& dR, const Vector& dQ,
                     const Vector& dm, double dt, int& clips) const;

  Grid1D grid_;
  Exponents exps_;
  SchemeConfig scheme_;
  DeriveOptions derive_;
  std::shared_ptr<const Forcing> forcing_;
};

struct RunOptions {
  double t_end = 0.0;
  double snapshot_interval = 0.0;  // <= 0: only t = 0 and t_end
  bool alpha_diagnostic = true;
  std::size_t max_steps = 50'000'000;
};

struct Snapshot {
  FieldState state;
  DerivedFields derived;
  /// Volume fraction evolved by its non-conservative equation (empty when the
  /// diagnostic is disabled).
  Vector alpha_transported;
  double energy = 0.0;
  /// Time integral of dissipation_rate from 0 up to this snapshot.
  double dissipation = 0.0;
};

struct Trajectory {
  Grid1D grid;
  std::vector<Snapshot> snapshots;
  std::vector<double> dt_series;
  std::size_t steps = 0;
  int clips = 0;
  int alpha_clamps = 0;
  int max_closure_iterations = 0;
  double max_wave_speed = 0.0;
  bool forced = false;

  const Snapshot& front() const { return snapshots.front(); }
  const Snapshot& back() const { return snapshots.back(); }
};

/// Snapshot times k * interval (k = 1, 2, ...) capped by t_end; every time is
/// hit exactly because the last step before it is shortened.
std::vector<double> snapshot_times(double t_end, double interval);

Trajectory run(const Solver& solver, const FieldState& initial, const RunOptions& opts);

}  // namespace twofluid
