#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "twofluid/fields.hpp"

using namespace twofluid;
using doctest::Approx;

namespace {

const Exponents kExps{3.0, 1.5};

FieldState bump_state(Eigen::Index n) {
  const Grid1D g(n, 1.0, BoundaryCondition::Periodic);
  FieldState s = FieldState::uniform(n, 1.0, 1.0, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = g.center(i);
    s.R(i) = 1.0 + 0.5 * std::exp(-std::pow((x - 0.4) / 0.1, 2));
    s.Q(i) = 0.5 + 0.3 * std::exp(-std::pow((x - 0.6) / 0.1, 2));
    s.m(i) = (s.R(i) + s.Q(i)) * 0.2 * std::sin(2.0 * M_PI * x);
  }
  return s;
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid1D g(8, 2.0, BoundaryCondition::NoSlip);
  CHECK(g.dx() == 0.25);
  CHECK(g.center(0) == 0.125);
  CHECK(g.center(7) == 1.875);
  CHECK(g.centers().size() == 8);
  CHECK_THROWS_AS(Grid1D(3, 1.0, BoundaryCondition::Periodic), Error);
  CHECK_THROWS_AS(Grid1D(8, 0.0, BoundaryCondition::Periodic), Error);
}

TEST_CASE("derive on a uniform state") {
  const FieldState s = FieldState::uniform(16, 1.0, 2.0, 1.0);
  CHECK(s.m(0) == 3.0);
  const DerivedFields d = derive(s, kExps);
  for (Eigen::Index i = 0; i < 16; ++i) {
    CHECK(d.Z(i) == Approx(2.0).epsilon(1e-13));
    CHECK(d.alpha(i) == Approx(0.5).epsilon(1e-13));
    CHECK(d.rho_plus(i) == Approx(2.0).epsilon(1e-13));
    CHECK(d.rho_minus(i) == Approx(4.0).epsilon(1e-13));
    CHECK(d.p(i) == Approx(8.0).epsilon(1e-13));
    CHECK(d.u(i) == Approx(1.0).epsilon(1e-15));
    CHECK_FALSE(d.vacuum(i));
  }
}

TEST_CASE("derive on an all-vacuum state") {
  const FieldState s = FieldState::uniform(8, 0.0, 0.0, 0.0);
  const DerivedFields d = derive(s, kExps);
  CHECK(d.vacuum.all());
  CHECK((d.u == 0.0).all());
  CHECK((d.Z == 0.0).all());
  CHECK(total_energy(s, Grid1D(8, 1.0, BoundaryCondition::Periodic), kExps) == 0.0);
}

TEST_CASE("derive matches the bisection oracle cell by cell") {
  const FieldState s = bump_state(64);
  const DerivedFields d = derive(s, kExps);
  const double g = kExps.gamma();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double Z = oracle::bisect_closure(s.R(i), s.Q(i), g);
    CHECK(oracle::rel_close(d.Z(i), Z, 1e-12));
    CHECK(oracle::rel_close(d.p(i), std::pow(Z, kExps.gamma_plus()), 1e-11));
  }
}

TEST_CASE("derive reports the failing cell") {
  FieldState s = FieldState::uniform(8, 1.0, 1.0, 0.0);
  s.Q(5) = std::nan("");
  try {
    derive(s, kExps);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
    CHECK(e.cell() == 5);
  }
}

TEST_CASE("total mass and energy examples") {
  const Grid1D g(10, 1.0, BoundaryCondition::Periodic);
  const FieldState s = FieldState::uniform(10, 1.0, 2.0, 1.0);
  const TotalMass m = total_mass(s, g);
  CHECK(m.R == Approx(1.0).epsilon(1e-15));
  CHECK(m.Q == Approx(2.0).epsilon(1e-15));
  CHECK(total_energy(s, g, kExps) == Approx(11.5).epsilon(1e-13));
}

TEST_CASE("energy is invariant under velocity reversal") {
  const Grid1D g(64, 1.0, BoundaryCondition::Periodic);
  FieldState s = bump_state(64);
  const double e = total_energy(s, g, kExps);
  s.m = -s.m;
  CHECK(total_energy(s, g, kExps) == e);
}

TEST_CASE("with gamma equal to one the internal energy is homogeneous") {
  // Equal exponents make the closure linear, Z = R + Q, so the internal
  // energy is homogeneous of degree gamma+ in (R, Q).
  const Exponents e{2.0, 2.0};
  const Grid1D g(32, 1.0, BoundaryCondition::Periodic);
  FieldState s = bump_state(32);
  s.m.setZero();
  FieldState t = s;
  t.R *= 3.0;
  t.Q *= 3.0;
  const DerivedFields ds = derive(s, e), dt = derive(t, e);
  for (Eigen::Index i = 0; i < 32; ++i) CHECK(dt.Z(i) == Approx(3.0 * ds.Z(i)).epsilon(1e-13));
  CHECK(total_energy(t, g, e) == Approx(9.0 * total_energy(s, g, e)).epsilon(1e-12));
}

TEST_CASE("essential and residual classification") {
  const DerivedFields d = derive(FieldState::uniform(12, 1.0, 2.0, 0.0), kExps);
  const EssentialMask all = classify_ess_res(d, 1.0, 5.0);
  CHECK(all.essential.all());
  CHECK(all.n_essential == 12);
  const EssentialMask none = classify_ess_res(d, 1.0, 3.0);
  CHECK_FALSE(none.essential.any());
  CHECK(none.n_residual == 12);

  const DerivedFields dm = derive(bump_state(64), kExps);
  const EssentialMask mixed = classify_ess_res(dm, 0.9, 1.3);
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < 64; ++i) {
    const bool in = dm.rho_plus(i) >= 0.9 && dm.rho_plus(i) <= 1.3 && dm.rho_minus(i) >= 0.9 &&
                    dm.rho_minus(i) <= 1.3;
    CHECK(mixed.essential(i) == in);
    count += in;
  }
  CHECK(mixed.n_essential == count);
  CHECK(mixed.n_essential + mixed.n_residual == 64);

  const auto [lo, hi] = default_essential_window(dm);
  CHECK(classify_ess_res(dm, lo, hi).essential.all());
}

TEST_CASE("snapshot csv round trip") {
  const Grid1D g(16, 1.0, BoundaryCondition::Periodic);
  const FieldState s = bump_state(16);
  const DerivedFields d = derive(s, kExps);
  std::ostringstream os;
  write_snapshot_csv(os, s, d, g);
  const std::string text = os.str();
  CHECK(text.rfind("i,x,R,Q,m,Z,alpha,rho_plus,rho_minus,p,u\n", 0) == 0);

  const std::string path = "test_fields_snapshot.csv";
  write_snapshot_csv(path, s, d, g);
  const FieldState back = read_snapshot_csv(path);
  std::remove(path.c_str());
  CHECK((back.R == s.R).all());
  CHECK((back.Q == s.Q).all());
  CHECK((back.m == s.m).all());
}

TEST_CASE("restriction averages and preserves mass") {
  const Grid1D fine(64, 1.0, BoundaryCondition::Periodic);
  const Grid1D coarse(16, 1.0, BoundaryCondition::Periodic);
  const FieldState s = bump_state(64);
  const FieldState r = restrict_average(s, 4);
  CHECK(r.size() == 16);
  CHECK(r.R(3) == Approx((s.R(12) + s.R(13) + s.R(14) + s.R(15)) / 4.0).epsilon(1e-15));
  CHECK(total_mass(r, coarse).R == Approx(total_mass(s, fine).R).epsilon(1e-14));
  CHECK_THROWS_AS(restrict_average(s, 3), Error);
}
