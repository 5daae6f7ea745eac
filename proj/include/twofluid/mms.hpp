#pragma once

#include "twofluid/solver.hpp"

namespace twofluid {

/// Manufactured fields on a periodic interval of length L, k = 2 pi / L:
///   R = a + b sin(k x - t),  Q = c + d cos(k x + t),  u = e sin(k x) cos(t).
/// The pressure is taken from the true closure of (R, Q), so the momentum
/// source carries the closure through its x-derivative.
struct MmsParameters {
  double a = 2.0;
  double b = 0.2;
  double c = 2.0;
  double d = 0.2;
  double e = 0.3;

  bool operator==(const MmsParameters&) const = default;
};

struct MmsPoint {
  double R, Q, u;
};

class MmsSolution final : public Forcing {
 public:
  MmsSolution(MmsParameters params, Exponents exps, double nu, double length,
              ClosureOptions<double> closure = {});

  MmsPoint exact(double x, double t) const;
  /// Pointwise sources (S_R, S_Q, S_m) of the manufactured solution.
  MmsPoint pointwise_source(double x, double t) const;

  /// Cell averages of R, Q and m = (R+Q) u by 5-point Gauss-Legendre.
  FieldState cell_averages(const Grid1D& grid, double t) const;

  void source(double t, const Grid1D& grid, Vector& sR, Vector& sQ, Vector& sm) const override;

  const MmsParameters& parameters() const { return params_; }

 private:
  template <typename F>
  double cell_average(const Grid1D& grid, Eigen::Index i, F&& f) const;

  MmsParameters params_;
  Exponents exps_;
  double nu_;
  double k_;
  ClosureOptions<double> closure_;
};

}  // namespace twofluid
