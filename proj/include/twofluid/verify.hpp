#pragma once

#include <limits>
#include <string>
#include <vector>

#include "twofluid/mms.hpp"
#include "twofluid/solver.hpp"

namespace twofluid {

/// One time slice of the relative entropy between a run (alpha, rho+-, u)
/// and a reference (beta, rho~+-, v):
///   E_kin        = int (R+Q)|u-v|^2 / 2
///   E_alpha      = int (alpha-beta)^2 / 2
///   E_breg_plus  = int alpha     Breg+(rho+ | rho~+)
///   E_breg_minus = int (1-alpha) Breg-(rho- | rho~-)
/// and the relative dissipation D = int nu_eff (d_x(u-v))^2.
struct RERow {
  double t = 0.0;
  double E_kin = 0.0;
  double E_alpha = 0.0;
  double E_breg_plus = 0.0;
  double E_breg_minus = 0.0;
  double E_total = 0.0;
  double D = 0.0;

  /// Functional without the volume-fraction part.
  double reduced() const { return E_kin + E_breg_plus + E_breg_minus; }
};

RERow relative_entropy(const Grid1D& grid, const FieldState& a, const DerivedFields& da,
                       const FieldState& b, const DerivedFields& db, const Exponents& exps,
                       double nu = 0.0);
RERow relative_entropy(const Grid1D& grid, const Snapshot& a, const Snapshot& b,
                       const Exponents& exps, double nu = 0.0);

/// Relative entropy along two trajectories with identical snapshot times.
std::vector<RERow> relative_entropy_series(const Trajectory& run, const Trajectory& reference,
                                           const Exponents& exps, double nu);

/// Fine trajectory averaged onto `coarse` (which must nest), closure re-derived.
Trajectory restrict_trajectory(const Trajectory& fine, const Grid1D& coarse,
                               const Exponents& exps, const DeriveOptions& opts = {});

/// Reference trajectory built from the exact manufactured solution at the
/// snapshot times of `like`.
Trajectory mms_reference_trajectory(const MmsSolution& mms, const Trajectory& like,
                                    const Exponents& exps, const DeriveOptions& opts = {});

struct EnergyAudit {
  bool passed = true;
  bool skipped = false;
  std::string note;
  double eps = 0.0;
  /// max over snapshots of (E(t) + dissipation(t)) / E(0) - 1.
  double worst_margin = -std::numeric_limits<double>::infinity();
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> dissipation;
};

EnergyAudit energy_audit(const Trajectory& traj, double eps_E);

struct GronwallFit {
  /// true when E(0) < e0_floor: no ratio is formed, only max E is reported.
  bool identical_data = false;
  /// true when every sample is below the noise threshold.
  bool at_noise_floor = false;
  double C_fit = std::numeric_limits<double>::quiet_NaN();
  double C_exp_fit = std::numeric_limits<double>::quiet_NaN();
  double max_E = 0.0;
  std::size_t fitted_points = 0;
};

/// Ratio mode: C_fit = max E(t)/E(0) and the least-squares rate c of
/// log(E(t)/E(0)) = c t over samples above noise_threshold.
GronwallFit gronwall_check(const std::vector<double>& times, const std::vector<double>& E,
                           double e0_floor, double noise_threshold = 0.0);
GronwallFit gronwall_check(const std::vector<RERow>& series, double e0_floor,
                           double noise_threshold = 0.0);

struct AlphaStabilityReport {
  double delta = 0.0;
  /// Smallest constant C with, at every snapshot k,
  ///   A_k - A_0 <= delta * sum_j dt_j |v-u|^2_{W12}(t_j) + C * sum_j dt_j A_j,
  /// A = int (alpha-beta)^2, left Riemann sums over j < k.
  double C_delta = 0.0;
  bool finite = true;
  double max_growth = 0.0;
};

/// Discrete W^{1,2} norm squared: sum dx (f^2 + (forward difference / dx)^2).
double w12_norm_squared(const Vector& f, const Grid1D& grid);

AlphaStabilityReport alpha_stability_check(const std::vector<double>& times,
                                           const std::vector<Vector>& alpha,
                                           const std::vector<Vector>& beta,
                                           const std::vector<Vector>& u,
                                           const std::vector<Vector>& v, const Grid1D& grid,
                                           double delta);
AlphaStabilityReport alpha_stability_check(const Trajectory& run, const Trajectory& reference,
                                           double delta);

struct CoercivityReport {
  double E_bar = 0.0;
  double rhs_essential = 0.0;
  double rhs_residual = 0.0;
  /// E_bar / (rhs_essential + rhs_residual); +inf when the right side is 0.
  double C_lb = std::numeric_limits<double>::infinity();
  Eigen::Index n_essential = 0;
  Eigen::Index n_residual = 0;
  double c_star = 0.0;
  double c_star_upper = 0.0;
};

CoercivityReport coercivity_check(const Grid1D& grid, const FieldState& a,
                                  const DerivedFields& da, const FieldState& b,
                                  const DerivedFields& db, const Exponents& exps, double c_star,
                                  double c_star_upper);

struct MmsStudySpec {
  Eigen::Index n0 = 128;
  double length = 1.0;
  Exponents exps{3.0, 1.5};
  SchemeConfig scheme{};
  DeriveOptions derive{};
  MmsParameters mms{};
  double t_end = 0.1;
};

struct ConvergenceReport {
  std::vector<Eigen::Index> n;
  std::vector<double> err_R, err_Q, err_u;
  std::vector<double> order_R, order_Q, order_u;

  /// Smallest observed order over all variables and refinements; NaN orders
  /// count as failures and make this NaN.
  double min_order() const;
  bool passes(double threshold) const;
};

/// Discrete L2 norm sqrt(sum dx f^2).
double l2_norm(const Vector& f, const Grid1D& grid);

ConvergenceReport convergence_study(const MmsStudySpec& spec, int levels);

}  // namespace twofluid
