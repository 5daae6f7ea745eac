#pragma once

// Implicit algebraic pressure closure.
//
// Given the partial masses R = alpha*rho_plus and Q = (1-alpha)*rho_minus of
// two barotropic phases with p_plus = rho_plus^gp and p_minus = rho_minus^gm in
// pressure equilibrium, the common root Z = rho_plus solves
//
//     (Z - R) * Z^(gamma-1) = Q,   gamma = gp / gm,   Z >= R,
//
// after which alpha = R/Z, rho_minus = Z^gamma and p = Z^gp.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twofluid/errors.hpp"

namespace twofluid {

template <typename Scalar>
class ExponentPair {
 public:
  ExponentPair(Scalar gamma_plus, Scalar gamma_minus)
      : gamma_plus_(gamma_plus), gamma_minus_(gamma_minus) {
    if (!(std::isfinite(gamma_plus) && std::isfinite(gamma_minus)) ||
        !(gamma_plus > Scalar(1)) || !(gamma_minus > Scalar(1))) {
      throw Error(ErrorKind::ValidationError,
                  "adiabatic exponents must satisfy gamma_plus > 1 and gamma_minus > 1");
    }
  }

  Scalar gamma_plus() const noexcept { return gamma_plus_; }
  Scalar gamma_minus() const noexcept { return gamma_minus_; }
  /// Ratio gamma_plus / gamma_minus, recomputed on every call.
  Scalar gamma() const noexcept { return gamma_plus_ / gamma_minus_; }

  bool operator==(const ExponentPair&) const = default;

 private:
  Scalar gamma_plus_;
  Scalar gamma_minus_;
};

template <typename Scalar>
struct PartialMasses {
  Scalar R{};
  Scalar Q{};
};

template <typename Scalar>
struct ClosureState {
  Scalar Z{};
  Scalar alpha{};
  /// 1 - alpha computed as (Z - R)/Z from the solved gap, so it keeps full
  /// relative precision when alpha is close to one.
  Scalar one_minus_alpha{};
  Scalar rho_plus{};
  Scalar rho_minus{};
  Scalar p{};
  bool vacuum_flag = false;
  int iterations = 0;
};

template <typename Scalar>
struct AlphaSensitivity {
  Scalar d_alpha_dR{};
  Scalar d_alpha_dQ{};
  Scalar omega{};
};

template <typename Scalar>
struct ClosureOptions {
  Scalar rel_tol = Scalar(1e-12);
  int max_iter = 200;
  Scalar vacuum_alpha = Scalar(0.5);
};

/// Gap W = Z - R together with the iteration count of the solve.
template <typename Scalar>
struct ClosureRoot {
  Scalar Z{};
  Scalar gap{};
  int iterations = 0;
};

namespace detail {

template <typename Scalar>
void require_finite_masses(Scalar R, Scalar Q) {
  if (!std::isfinite(R) || !std::isfinite(Q)) {
    throw Error(ErrorKind::NonFinite, "closure input is not finite: R=" +
                                          std::to_string(static_cast<double>(R)) +
                                          " Q=" + std::to_string(static_cast<double>(Q)));
  }
}

}  // namespace detail

/// f(Z) = (Z - R) Z^(gamma-1) - Q. Strictly increasing on [R, inf).
/// At Z = 0 (hence R = 0) the product is taken as its limit 0.
template <typename Scalar>
Scalar closure_residual(Scalar Z, Scalar R, Scalar Q, Scalar gamma) {
  using std::pow;
  if (Z == Scalar(0)) return -Q;
  return (Z - R) * pow(Z, gamma - Scalar(1)) - Q;
}

/// df/dZ = Z^(gamma-2) (gamma Z + (1-gamma) R).
template <typename Scalar>
Scalar closure_residual_derivative(Scalar Z, Scalar R, Scalar gamma) {
  using std::pow;
  return pow(Z, gamma - Scalar(2)) * (gamma * Z + (Scalar(1) - gamma) * R);
}

/// Solves for the gap W = Z - R >= 0 of g(W) = W (R+W)^(gamma-1) - Q.
///
/// Working in W keeps the problem well conditioned: W g'(W) / g(W) + Q lies
/// in [min(1,gamma), max(1,gamma)], so a relative residual of rel_tol is
/// reachable even when Q << R^gamma. Safeguarded Newton inside a bracket;
/// any Newton iterate that leaves the bracket is replaced by bisection.
template <typename Scalar>
ClosureRoot<Scalar> solve_closure_root(Scalar R, Scalar Q, Scalar gamma,
                                       const ClosureOptions<Scalar>& opts = {}) {
  using std::abs;
  using std::pow;
  detail::require_finite_masses(R, Q);
  if (!(R >= Scalar(0)) || !(Q >= Scalar(0))) {
    throw Error(ErrorKind::ValidationError, "closure requires R >= 0 and Q >= 0");
  }
  if (!(gamma > Scalar(0)) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::ValidationError, "closure requires a finite gamma > 0");
  }
  if (!(opts.rel_tol > Scalar(0))) {
    throw Error(ErrorKind::ValidationError, "closure tolerance must be positive");
  }

  if (Q == Scalar(0)) return {R, Scalar(0), 0};
  if (R == Scalar(0)) {
    const Scalar Z = pow(Q, Scalar(1) / gamma);
    return {Z, Z, 0};
  }
  if (gamma == Scalar(1)) return {R + Q, Q, 0};

  const auto g = [&](Scalar W) { return W * pow(R + W, gamma - Scalar(1)) - Q; };
  const auto dg = [&](Scalar W) {
    return pow(R + W, gamma - Scalar(2)) * (R + gamma * W);
  };

  // Both Q R^(1-gamma) (small-gap limit) and Q^(1/gamma) (large-gap limit)
  // bound the root: from above when gamma > 1, from below when gamma < 1.
  const Scalar small_gap = Q * pow(R, Scalar(1) - gamma);
  const Scalar large_gap = pow(Q, Scalar(1) / gamma);
  const Scalar tiny = std::numeric_limits<Scalar>::min();

  Scalar lo = Scalar(0);
  Scalar hi;
  Scalar W;
  if (gamma > Scalar(1)) {
    hi = std::max(std::min(small_gap, large_gap), tiny);
    W = hi;
  } else {
    lo = std::max(small_gap, large_gap);
    hi = std::max(lo, tiny);
    int doublings = 0;
    while (g(hi) < Scalar(0)) {
      lo = hi;
      hi *= Scalar(2);
      if (++doublings > 2 * std::numeric_limits<Scalar>::max_exponent) {
        throw Error(ErrorKind::MaxIterExceeded, "closure bracket expansion failed");
      }
    }
    W = lo;
  }
  // Guarantee hi is a valid upper end even if the analytic bound rounded low.
  while (g(hi) < Scalar(0)) {
    lo = hi;
    hi *= Scalar(2);
  }

  const Scalar target = opts.rel_tol * Q;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Scalar gw = g(W);
    if (abs(gw) <= target) return {R + W, W, it};
    if (gw < Scalar(0)) {
      lo = W;
    } else {
      hi = W;
    }
    if (hi - lo <= Scalar(2) * eps * hi) {
      W = Scalar(0.5) * (lo + hi);
      return {R + W, W, it};
    }
    const Scalar slope = dg(W);
    Scalar next = W - gw / slope;
    if (!(slope > Scalar(0)) || !(next > lo) || !(next < hi)) {
      next = Scalar(0.5) * (lo + hi);
    }
    W = next;
  }
  throw Error(ErrorKind::MaxIterExceeded,
              "closure solve did not converge in " + std::to_string(opts.max_iter) +
                  " iterations (R=" + std::to_string(static_cast<double>(R)) +
                  ", Q=" + std::to_string(static_cast<double>(Q)) + ")");
}

template <typename Scalar>
Scalar solve_closure(Scalar R, Scalar Q, Scalar gamma, Scalar tol = Scalar(1e-12)) {
  ClosureOptions<Scalar> opts;
  opts.rel_tol = tol;
  return solve_closure_root(R, Q, gamma, opts).Z;
}

template <typename Scalar>
ClosureState<Scalar> recover_state(Scalar R, Scalar Q, const ExponentPair<Scalar>& exps,
                                   const ClosureOptions<Scalar>& opts = {}) {
  using std::pow;
  const ClosureRoot<Scalar> root = solve_closure_root(R, Q, exps.gamma(), opts);
  ClosureState<Scalar> s;
  s.iterations = root.iterations;
  s.Z = root.Z;
  if (root.Z == Scalar(0)) {
    s.vacuum_flag = true;
    s.alpha = opts.vacuum_alpha;
    s.one_minus_alpha = Scalar(1) - opts.vacuum_alpha;
    return s;
  }
  s.alpha = R / root.Z;
  s.one_minus_alpha = root.gap / root.Z;
  s.rho_plus = root.Z;
  s.rho_minus = pow(root.Z, exps.gamma());
  s.p = pow(root.Z, exps.gamma_plus());
  return s;
}

template <typename Scalar>
ClosureState<Scalar> recover_state(const PartialMasses<Scalar>& masses,
                                   const ExponentPair<Scalar>& exps,
                                   const ClosureOptions<Scalar>& opts = {}) {
  return recover_state(masses.R, masses.Q, exps, opts);
}

/// omega(alpha) = (gamma-1) alpha (1-alpha) / (gamma (1-alpha) + alpha), the
/// coefficient of div u in the non-conservative volume-fraction equation.
template <typename Scalar>
Scalar omega_of_alpha(Scalar alpha, Scalar gamma) {
  const Scalar beta = Scalar(1) - alpha;
  return (gamma - Scalar(1)) * alpha * beta / (gamma * beta + alpha);
}

/// Partial derivatives of alpha(R, Q) from implicit differentiation of
/// R^gamma (1-alpha) = Q alpha^gamma. When the shared denominator
/// Q gamma alpha^(gamma-1) + R^gamma underflows (near-vacuum, alpha -> 0),
/// the equivalent form written through Z is used instead:
///   d_alpha/dR =  gamma (1-alpha) / (Z D),
///   d_alpha/dQ = -alpha Z^(-gamma) / D,      D = gamma (1-alpha) + alpha.
template <typename Scalar>
AlphaSensitivity<Scalar> alpha_partials(Scalar R, Scalar Q, Scalar gamma,
                                        const ClosureOptions<Scalar>& opts = {}) {
  using std::pow;
  detail::require_finite_masses(R, Q);
  if (!(R + Q > Scalar(0))) {
    throw Error(ErrorKind::VacuumCell, "alpha_partials is undefined on a vacuum cell");
  }
  const ClosureRoot<Scalar> root = solve_closure_root(R, Q, gamma, opts);
  const Scalar alpha = R / root.Z;
  const Scalar beta = root.gap / root.Z;

  AlphaSensitivity<Scalar> out;
  out.omega = omega_of_alpha(alpha, gamma);

  const Scalar alpha_pow = pow(alpha, gamma - Scalar(1));
  const Scalar denom = Q * gamma * alpha_pow + pow(R, gamma);
  const bool degenerate = !std::isfinite(alpha_pow) || !std::isfinite(denom) ||
                          !(denom >= std::numeric_limits<Scalar>::min());
  if (!degenerate) {
    out.d_alpha_dQ = -pow(alpha, gamma) / denom;
    out.d_alpha_dR = gamma * pow(R, gamma - Scalar(1)) * beta / denom;
    if (std::isfinite(out.d_alpha_dR) && std::isfinite(out.d_alpha_dQ)) return out;
  }
  const Scalar D = gamma * beta + alpha;
  out.d_alpha_dR = gamma * beta / (root.Z * D);
  out.d_alpha_dQ = -alpha * pow(root.Z, -gamma) / D;
  return out;
}

}  // namespace twofluid
