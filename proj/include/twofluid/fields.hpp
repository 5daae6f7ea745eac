#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>

#include "twofluid/closure.hpp"

namespace twofluid {

using Vector = Eigen::ArrayXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;
using Exponents = ExponentPair<double>;

enum class BoundaryCondition { Periodic, NoSlip };

const char* to_string(BoundaryCondition bc);

/// Uniform 1D grid on [0, length]. Cell i covers [i dx, (i+1) dx].
class Grid1D {
 public:
  Grid1D(Eigen::Index n, double length, BoundaryCondition bc);

  Eigen::Index n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double dx() const noexcept { return dx_; }
  BoundaryCondition bc() const noexcept { return bc_; }
  double center(Eigen::Index i) const noexcept { return (double(i) + 0.5) * dx_; }
  Vector centers() const;

  bool operator==(const Grid1D& o) const {
    return n_ == o.n_ && length_ == o.length_ && bc_ == o.bc_;
  }

 private:
  Eigen::Index n_;
  double length_;
  double dx_;
  BoundaryCondition bc_;
};

/// Conserved unknowns on cell centres: partial masses and mixture momentum.
struct FieldState {
  double t = 0.0;
  Vector R;
  Vector Q;
  Vector m;

  Eigen::Index size() const { return R.size(); }
  static FieldState uniform(Eigen::Index n, double R, double Q, double u);
};

struct DeriveOptions {
  ClosureOptions<double> closure{};
  double density_floor = 1e-12;
};

/// Per-cell closure output in structure-of-arrays layout, plus velocity.
struct DerivedFields {
  Vector Z;
  Vector alpha;
  Vector one_minus_alpha;
  Vector rho_plus;
  Vector rho_minus;
  Vector p;
  Mask vacuum;
  Vector u;
  int max_iterations = 0;

  Eigen::Index size() const { return Z.size(); }
  ClosureState<double> cell(Eigen::Index i) const;
};

/// Cell-wise closure recovery. Closure errors are rethrown with the cell index.
DerivedFields derive(const FieldState& state, const Exponents& exps,
                     const DeriveOptions& opts = {});

struct TotalMass {
  double R = 0.0;
  double Q = 0.0;
};

/// Fixed left-to-right sums of R dx and Q dx.
TotalMass total_mass(const FieldState& state, const Grid1D& grid);

/// Sum of dx [ (R+Q) u^2 / 2 + alpha H+(rho+) + (1-alpha) H-(rho-) ].
double total_energy(const DerivedFields& derived, const FieldState& state,
                    const Grid1D& grid, const Exponents& exps);
double total_energy(const FieldState& state, const Grid1D& grid, const Exponents& exps,
                    const DeriveOptions& opts = {});

struct EssentialMask {
  Mask essential;
  double c_star = 0.0;
  double c_star_upper = 0.0;
  Eigen::Index n_essential = 0;
  Eigen::Index n_residual = 0;
};

/// Cell is essential iff both phase densities lie in [c_star, c_star_upper].
EssentialMask classify_ess_res(const DerivedFields& derived, double c_star,
                               double c_star_upper);

/// Default window: half the smallest and twice the largest phase density of
/// the (non-vacuum cells of the) reference.
std::pair<double, double> default_essential_window(const DerivedFields& reference);

/// Snapshot CSV, header `i,x,R,Q,m,Z,alpha,rho_plus,rho_minus,p,u`, %.17g.
void write_snapshot_csv(std::ostream& out, const FieldState& state,
                        const DerivedFields& derived, const Grid1D& grid);
void write_snapshot_csv(const std::string& path, const FieldState& state,
                        const DerivedFields& derived, const Grid1D& grid);

/// Reads R, Q, m back from a snapshot file (time is not stored in the file).
FieldState read_snapshot_csv(const std::string& path);

/// Cell averages of a fine state onto a grid `factor` times coarser.
FieldState restrict_average(const FieldState& fine, Eigen::Index factor);

}  // namespace twofluid
