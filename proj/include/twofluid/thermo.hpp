#pragma once

// Barotropic power laws p(rho) = rho^gamma, Helmholtz potentials
// H(rho) = rho^gamma / (gamma - 1) and the Bregman distances built from them.

#include <cmath>
#include <limits>

#include "twofluid/errors.hpp"

namespace twofluid {

template <typename Scalar>
class PhaseLaw {
 public:
  explicit PhaseLaw(Scalar gamma) : gamma_(gamma) {
    if (!std::isfinite(gamma) || !(gamma > Scalar(1))) {
      throw Error(ErrorKind::ValidationError, "phase law requires gamma > 1");
    }
  }
  Scalar gamma() const noexcept { return gamma_; }

 private:
  Scalar gamma_;
};

template <typename Scalar>
Scalar pressure(Scalar rho, const PhaseLaw<Scalar>& law) {
  using std::pow;
  return pow(rho, law.gamma());
}

template <typename Scalar>
Scalar pressure_derivative(Scalar rho, const PhaseLaw<Scalar>& law) {
  using std::pow;
  return law.gamma() * pow(rho, law.gamma() - Scalar(1));
}

template <typename Scalar>
Scalar helmholtz(Scalar rho, const PhaseLaw<Scalar>& law) {
  using std::pow;
  return pow(rho, law.gamma()) / (law.gamma() - Scalar(1));
}

template <typename Scalar>
Scalar helmholtz_derivative(Scalar rho, const PhaseLaw<Scalar>& law) {
  using std::pow;
  return law.gamma() / (law.gamma() - Scalar(1)) * pow(rho, law.gamma() - Scalar(1));
}

template <typename Scalar>
Scalar helmholtz_second_derivative(Scalar rho, const PhaseLaw<Scalar>& law) {
  using std::pow;
  return law.gamma() * pow(rho, law.gamma() - Scalar(2));
}

namespace detail {

/// phi(x) = (1+x)^gamma - 1 - gamma x for x >= -1, without cancellation.
/// Near x = 0 the binomial series is summed from the quadratic term on.
template <typename Scalar>
Scalar power_bregman_kernel(Scalar x, Scalar gamma) {
  using std::abs;
  using std::expm1;
  using std::log1p;
  using std::pow;
  if (x == Scalar(0)) return Scalar(0);
  if (abs(x) > Scalar(0.05)) {
    if (x <= Scalar(-1)) return gamma - Scalar(1);  // rho = 0
    return expm1(gamma * log1p(x)) - gamma * x;
  }
  // sum_{k>=2} binom(gamma, k) x^k
  Scalar coeff = gamma * (gamma - Scalar(1)) / Scalar(2);
  Scalar xk = x * x;
  Scalar sum = coeff * xk;
  for (int k = 3; k < 64; ++k) {
    coeff *= (gamma - Scalar(k - 1)) / Scalar(k);
    xk *= x;
    const Scalar term = coeff * xk;
    sum += term;
    if (abs(term) <= std::numeric_limits<Scalar>::epsilon() * abs(sum) * Scalar(0.25)) break;
  }
  return sum;
}

}  // namespace detail

/// Bregman distance H(rho) - H'(rho_ref)(rho - rho_ref) - H(rho_ref) >= 0.
///
/// Written as rho_ref^gamma / (gamma-1) * phi(rho/rho_ref - 1) so that the
/// quadratic leading behaviour near rho = rho_ref keeps full relative precision.
template <typename Scalar>
Scalar bregman(Scalar rho, Scalar rho_ref, const PhaseLaw<Scalar>& law) {
  using std::pow;
  const Scalar g = law.gamma();
  const Scalar x = (rho - rho_ref) / rho_ref;
  return pow(rho_ref, g) / (g - Scalar(1)) * detail::power_bregman_kernel(x, g);
}

/// p(rho_ref) - p'(rho_ref)(rho_ref - rho) - p(rho). Can take either sign.
template <typename Scalar>
Scalar pressure_bregman(Scalar rho, Scalar rho_ref, const PhaseLaw<Scalar>& law) {
  return pressure(rho_ref, law) - pressure_derivative(rho_ref, law) * (rho_ref - rho) -
         pressure(rho, law);
}

}  // namespace twofluid
