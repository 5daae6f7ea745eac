#include "twofluid/mms.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace twofluid {

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kNodes = {
    -0.9061798459386639927976269, -0.5384693101056830910363144, 0.0,
    0.5384693101056830910363144, 0.9061798459386639927976269};
constexpr std::array<double, 5> kWeights = {
    0.2369268850561890875142640, 0.4786286704993664680412915, 0.5688888888888888888888889,
    0.4786286704993664680412915, 0.2369268850561890875142640};

}  // namespace

MmsSolution::MmsSolution(MmsParameters params, Exponents exps, double nu, double length,
                         ClosureOptions<double> closure)
    : params_(params),
      exps_(exps),
      nu_(nu),
      k_(2.0 * std::numbers::pi / length),
      closure_(closure) {
  if (!(params_.a > std::abs(params_.b)) || !(params_.c > std::abs(params_.d))) {
    throw Error(ErrorKind::ValidationError,
                "manufactured partial masses must stay positive (a > |b|, c > |d|)");
  }
}

MmsPoint MmsSolution::exact(double x, double t) const {
  const auto& p = params_;
  return {p.a + p.b * std::sin(k_ * x - t), p.c + p.d * std::cos(k_ * x + t),
          p.e * std::sin(k_ * x) * std::cos(t)};
}

MmsPoint MmsSolution::pointwise_source(double x, double t) const {
  const auto& p = params_;
  const double sm_ = std::sin(k_ * x - t), cm = std::cos(k_ * x - t);
  const double sp = std::sin(k_ * x + t), cp = std::cos(k_ * x + t);
  const double sk = std::sin(k_ * x), ck = std::cos(k_ * x);
  const double st = std::sin(t), ct = std::cos(t);

  const double R = p.a + p.b * sm_;
  const double R_t = -p.b * cm;
  const double R_x = p.b * k_ * cm;
  const double Q = p.c + p.d * cp;
  const double Q_t = -p.d * sp;
  const double Q_x = -p.d * k_ * sp;
  const double u = p.e * sk * ct;
  const double u_t = -p.e * sk * st;
  const double u_x = p.e * k_ * ck * ct;
  const double u_xx = -p.e * k_ * k_ * sk * ct;

  const double rho = R + Q;
  const double rho_t = R_t + Q_t;
  const double rho_x = R_x + Q_x;

  // p = Z^gp with Z the closure root; dZ/dR = 1/D, dZ/dQ = Z^(1-gamma)/D.
  const double gamma = exps_.gamma();
  const ClosureState<double> cs = recover_state(R, Q, exps_, closure_);
  const double D = gamma * cs.one_minus_alpha + cs.alpha;
  const double Z_x = (R_x + std::pow(cs.Z, 1.0 - gamma) * Q_x) / D;
  const double p_x = exps_.gamma_plus() * std::pow(cs.Z, exps_.gamma_plus() - 1.0) * Z_x;

  MmsPoint s;
  s.R = R_t + R_x * u + R * u_x;
  s.Q = Q_t + Q_x * u + Q * u_x;
  s.u = rho_t * u + rho * u_t + rho_x * u * u + 2.0 * rho * u * u_x + p_x - nu_ * u_xx;
  return s;
}

template <typename F>
double MmsSolution::cell_average(const Grid1D& grid, Eigen::Index i, F&& f) const {
  const double half = 0.5 * grid.dx();
  const double mid = grid.center(i);
  double sum = 0.0;
  for (std::size_t q = 0; q < kNodes.size(); ++q) sum += kWeights[q] * f(mid + half * kNodes[q]);
  return 0.5 * sum;
}

FieldState MmsSolution::cell_averages(const Grid1D& grid, double t) const {
  const Eigen::Index n = grid.n();
  FieldState s;
  s.t = t;
  s.R.resize(n);
  s.Q.resize(n);
  s.m.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.R(i) = cell_average(grid, i, [&](double x) { return exact(x, t).R; });
    s.Q(i) = cell_average(grid, i, [&](double x) { return exact(x, t).Q; });
    s.m(i) = cell_average(grid, i, [&](double x) {
      const MmsPoint e = exact(x, t);
      return (e.R + e.Q) * e.u;
    });
  }
  return s;
}

void MmsSolution::source(double t, const Grid1D& grid, Vector& sR, Vector& sQ,
                         Vector& sm) const {
  const double half = 0.5 * grid.dx();
  for (Eigen::Index i = 0; i < grid.n(); ++i) {
    const double mid = grid.center(i);
    double aR = 0.0, aQ = 0.0, am = 0.0;
    for (std::size_t q = 0; q < kNodes.size(); ++q) {
      const MmsPoint s = pointwise_source(mid + half * kNodes[q], t);
      aR += kWeights[q] * s.R;
      aQ += kWeights[q] * s.Q;
      am += kWeights[q] * s.u;
    }
    sR(i) = 0.5 * aR;
    sQ(i) = 0.5 * aQ;
    sm(i) = 0.5 * am;
  }
}

}  // namespace twofluid
