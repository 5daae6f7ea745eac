#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "twofluid/closure.hpp"

using namespace twofluid;
using doctest::Approx;

TEST_CASE("closure_residual examples") {
  CHECK(closure_residual(2.0, 1.0, 2.0, 2.0) == 0.0);
  CHECK(closure_residual(1.0, 1.0, 0.0, 1.7) == 0.0);
  CHECK(closure_residual(3.0, 1.0, 2.0, 2.0) == 4.0);
  // Vacuum convention: 0^(gamma-1) never evaluated at Z = 0.
  CHECK(closure_residual(0.0, 0.0, 0.0, 0.5) == 0.0);
  CHECK(closure_residual(0.0, 0.0, 3.0, 0.5) == -3.0);
}

TEST_CASE("closure_residual is strictly increasing on [R, inf)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mass(0.0, 10.0), gam(0.25, 4.0), step(1e-3, 5.0);
  for (int k = 0; k < 2000; ++k) {
    const double R = mass(rng), Q = mass(rng), g = gam(rng);
    const double z1 = R + step(rng);
    const double z2 = z1 + step(rng);
    CHECK(closure_residual(z1, R, Q, g) < closure_residual(z2, R, Q, g));
    CHECK(closure_residual_derivative(z1, R, g) > 0.0);
  }
}

TEST_CASE("solve_closure examples") {
  CHECK(solve_closure(1.0, 2.0, 2.0) == Approx(2.0).epsilon(1e-14));
  CHECK(solve_closure(0.0, 4.0, 2.0) == 2.0);
  CHECK(solve_closure(0.3, 0.5, 1.0) == Approx(0.8).epsilon(1e-15));
  CHECK(solve_closure(2.0, 2.0, 2.0) == Approx(1.0 + std::sqrt(3.0)).epsilon(1e-14));
  CHECK(solve_closure(5.0, 0.0, 0.7) == 5.0);
  CHECK(solve_closure(0.0, 0.0, 2.0) == 0.0);
}

TEST_CASE("solve_closure errors") {
  const double nan = std::nan("");
  const double inf = std::numeric_limits<double>::infinity();
  for (auto [R, Q] : {std::pair{nan, 1.0}, {1.0, inf}, {inf, 0.0}}) {
    try {
      solve_closure(R, Q, 2.0);
      FAIL("expected NonFinite");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonFinite);
    }
  }
  ClosureOptions<double> opts;
  opts.max_iter = 1;
  try {
    solve_closure_root(1.0, 1e-3, 2.5, opts);
    FAIL("expected MaxIterExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MaxIterExceeded);
  }
}

TEST_CASE("solve_closure agrees with pure bisection") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mass(0.0, 10.0), gam(0.25, 4.0);
  for (int k = 0; k < 5000; ++k) {
    const double R = mass(rng), Q = mass(rng), g = gam(rng);
    const ClosureRoot<double> root = solve_closure_root(R, Q, g);
    const double ref = oracle::bisect_closure(R, Q, g);
    REQUIRE(oracle::rel_close(root.Z, ref, 1e-10));
    CHECK(root.Z >= R);
    // The residual at the returned root is within tolerance up to the
    // rounding of Z itself.
    const double ulp_slack = closure_residual_derivative(root.Z, R, g) * 4.0 *
                             std::numeric_limits<double>::epsilon() * root.Z;
    CHECK(std::abs(closure_residual(root.Z, R, Q, g)) <= 1e-12 * std::max(Q, 1e-300) + ulp_slack);
  }
}

TEST_CASE("closure map is monotone in R and Q") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mass(0.0, 10.0), gam(0.25, 4.0), bump(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const double R = mass(rng), Q = mass(rng), g = gam(rng), d = bump(rng);
    CHECK(solve_closure(R + d, Q, g) >= solve_closure(R, Q, g));
    CHECK(solve_closure(R, Q + d, g) >= solve_closure(R, Q, g));
  }
}

TEST_CASE("recover_state examples") {
  const ExponentPair<double> e31(3.0, 1.5);
  const auto s = recover_state(1.0, 2.0, e31);
  CHECK(s.Z == Approx(2.0));
  CHECK(s.alpha == Approx(0.5));
  CHECK(s.rho_plus == Approx(2.0));
  CHECK(s.rho_minus == Approx(4.0));
  CHECK(s.p == Approx(8.0));
  CHECK(std::pow(s.rho_minus, 1.5) == Approx(8.0));
  CHECK_FALSE(s.vacuum_flag);

  const auto v = recover_state(0.0, 0.0, e31);
  CHECK(v.vacuum_flag);
  CHECK(v.Z == 0.0);
  CHECK(v.p == 0.0);
  CHECK(v.alpha == 0.5);

  ClosureOptions<double> opts;
  opts.vacuum_alpha = 0.25;
  CHECK(recover_state(0.0, 0.0, e31, opts).alpha == 0.25);

  const auto pure = recover_state(5.0, 0.0, ExponentPair<double>(2.0, 2.0));
  CHECK(pure.Z == 5.0);
  CHECK(pure.alpha == 1.0);
  CHECK(pure.rho_plus == 5.0);
  CHECK(pure.p == Approx(25.0));
}

TEST_CASE("ExponentPair rejects exponents <= 1") {
  CHECK_THROWS_AS(ExponentPair<double>(1.0, 2.0), Error);
  CHECK_THROWS_AS(ExponentPair<double>(2.0, 0.5), Error);
  const ExponentPair<double> e(3.0, 1.5);
  CHECK(e.gamma() == 2.0);
}

TEST_CASE("recover_state invariants on random cells") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mass(0.0, 10.0), gexp(1.05, 4.0);
  for (int k = 0; k < 5000; ++k) {
    const double R = mass(rng), Q = mass(rng);
    const ExponentPair<double> e(gexp(rng), gexp(rng));
    const auto s = recover_state(R, Q, e);
    if (s.vacuum_flag) continue;
    const double g = e.gamma();
    CHECK(R <= s.Z);
    CHECK(s.alpha >= 0.0);
    CHECK(s.alpha <= 1.0);
    const double p_plus = std::pow(s.rho_plus, e.gamma_plus());
    const double p_minus = std::pow(s.rho_minus, e.gamma_minus());
    CHECK(std::abs(p_plus - p_minus) <= 1e-9 * std::max(s.p, 1.0));
    const double lhs = std::pow(R, g) * s.one_minus_alpha;
    const double rhs = Q * std::pow(s.alpha, g);
    CHECK(oracle::rel_close(lhs, rhs, 1e-9, 1e-300));
  }
}

TEST_CASE("alpha_partials examples") {
  const auto s = alpha_partials(1.0, 2.0, 2.0);
  CHECK(s.d_alpha_dR == Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(s.d_alpha_dQ == Approx(-1.0 / 12.0).epsilon(1e-13));
  CHECK(s.omega == Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK(s.d_alpha_dR * 1.0 + s.d_alpha_dQ * 2.0 == Approx(1.0 / 6.0).epsilon(1e-13));

  for (double g : {0.5, 1.3, 3.0}) CHECK(alpha_partials(5.0, 0.0, g).omega == 0.0);
  for (auto [R, Q] : {std::pair{1.0, 2.0}, {0.1, 7.0}, {4.0, 0.3}}) {
    CHECK(alpha_partials(R, Q, 1.0).omega == 0.0);
  }
  try {
    alpha_partials(0.0, 0.0, 2.0);
    FAIL("expected VacuumCell");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::VacuumCell);
  }
}

TEST_CASE("alpha_partials degenerate denominator uses the analytic limit") {
  // R = 0, gamma > 1: denominator is exactly 0; alpha = 0, d_alpha/dR = 1/Z.
  const auto s = alpha_partials(0.0, 4.0, 2.0);
  CHECK(s.d_alpha_dR == Approx(0.5));
  CHECK(s.d_alpha_dQ == 0.0);
  CHECK(s.omega == 0.0);
  // gamma < 1 with R = 0: alpha^(gamma-1) is infinite.
  const auto t = alpha_partials(0.0, 4.0, 0.5);
  CHECK(std::isfinite(t.d_alpha_dR));
  CHECK(t.d_alpha_dR == Approx(1.0 / 16.0));
  // Near-degenerate but representable values agree with the limit form.
  const auto u = alpha_partials(1e-200, 4.0, 2.0);
  CHECK(u.d_alpha_dR == Approx(0.5));
}

TEST_CASE("alpha_partials match finite differences and satisfy the Euler identity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mass(0.05, 10.0), gam(0.25, 4.0);
  for (int k = 0; k < 1000; ++k) {
    const double R = mass(rng), Q = mass(rng), g = gam(rng);
    const auto s = alpha_partials(R, Q, g);
    const auto fd = oracle::fd_alpha_partials(R, Q, g);
    CHECK(oracle::rel_close(s.d_alpha_dR, fd.dR, 1e-5, 1e-12));
    CHECK(oracle::rel_close(s.d_alpha_dQ, fd.dQ, 1e-5, 1e-12));
    CHECK(s.d_alpha_dR >= 0.0);
    CHECK(s.d_alpha_dQ <= 0.0);
    const double alpha = R / solve_closure(R, Q, g);
    const double euler = s.d_alpha_dR * R + s.d_alpha_dQ * Q;
    CHECK(std::abs(euler - omega_of_alpha(alpha, g)) <= 1e-9 * std::max(1.0, std::abs(s.omega)));
    CHECK(std::abs(s.omega) <= (g + 1.0) / std::min(1.0, g));
  }
}

TEST_CASE("omega_of_alpha examples and bound") {
  CHECK(omega_of_alpha(0.5, 2.0) == Approx(1.0 / 6.0).epsilon(1e-15));
  for (double g : {0.3, 1.0, 2.0, 7.0}) {
    CHECK(omega_of_alpha(0.0, g) == 0.0);
    CHECK(omega_of_alpha(1.0, g) == 0.0);
  }
  CHECK(omega_of_alpha(0.3, 1.0) == 0.0);

  for (double g : {0.1, 0.25, 0.5, 0.9, 1.0, 1.5, 2.0, 4.0, 10.0}) {
    const double sharp = std::abs(g - 1.0) / (4.0 * std::min(1.0, g));
    const double coarse = (g + 1.0) / std::min(1.0, g);
    for (int k = 0; k <= 100000; ++k) {
      const double a = double(k) / 100000.0;
      const double w = std::abs(omega_of_alpha(a, g));
      REQUIRE(w <= sharp * (1.0 + 1e-14));
      REQUIRE(w < coarse);
    }
  }
}

TEST_CASE("closure templates work with long double") {
  const long double Z = solve_closure<long double>(2.0L, 2.0L, 2.0L, 1e-18L);
  CHECK(std::abs(Z - (1.0L + std::sqrt(3.0L))) < 1e-17L);
}
