#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "chronexp/dyson.hpp"
#include "chronexp/linear_solvers.hpp"
#include "chronexp/matexp.hpp"
#include "chronexp/ode45.hpp"
#include "chronexp/ordered_exp.hpp"

using namespace chronexp::texp;
using chronexp::expr::Expression;

namespace {

Matrix m2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

double rel(const Matrix& x, const Matrix& y) {
  return (x - y).norm() / std::max(1.0, y.norm());
}

// Smooth random generator for engine checks: polynomial-plus-sine entries.
// Deliberately a different construction from the identity harness model.
MatrixFunction random_smooth(std::mt19937_64& rng, int n, double scale = 1.0) {
  auto um = [&]() { return -1.0 + 2.0 * (rng() >> 11) * 0x1.0p-53; };
  Eigen::MatrixXd c0(n, n), c1(n, n), c2(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      c0(i, j) = um();
      c1(i, j) = um();
      c2(i, j) = um();
    }
  return MatrixFunction::from_callable(n, [=](double t) {
    return Matrix(scale * (c0 + t * c1 + std::sin(1.3 * t) * c2) / 3.0);
  });
}

}  // namespace

TEST_CASE("matrix_exp closed forms") {
  // rotation generator
  double th = 0.73;
  Matrix rot = matrix_exp(m2(0, -th, th, 0));
  CHECK(rel(rot, m2(std::cos(th), -std::sin(th), std::sin(th), std::cos(th))) < 1e-14);
  // nilpotent
  CHECK(rel(matrix_exp(m2(0, 1, 0, 0)), m2(1, 1, 0, 1)) < 1e-15);
  // diagonal, large norm exercises the squaring path
  Matrix d = matrix_exp(m2(7.0, 0, 0, -3.0));
  CHECK(d(0, 0) == doctest::Approx(std::exp(7.0)).epsilon(1e-13));
  CHECK(d(1, 1) == doctest::Approx(std::exp(-3.0)).epsilon(1e-13));
  CHECK(d(0, 1) == 0.0);
}

TEST_CASE("ordered_exp: constant generator") {
  Matrix L = m2(0.3, -1.1, 0.7, 0.2);
  Matrix got = ordered_exp_value(MatrixFunction::constant(L), 0.2, 1.7);
  CHECK(rel(got, matrix_exp(Matrix(1.5 * L))) < 1e-11);
}

TEST_CASE("ordered_exp: commuting family integrates the scalar") {
  // L(t) = cos(t) L0 -> Texp = exp((sin t - sin a) L0)
  Matrix L0 = m2(0.2, 1.0, -0.5, 0.4);
  auto L = MatrixFunction::from_callable(2, [&](double t) { return Matrix(std::cos(t) * L0); });
  double a = 0.1, t = 1.4;
  Matrix got = ordered_exp_value(L, a, t);
  Matrix want = matrix_exp(Matrix((std::sin(t) - std::sin(a)) * L0));
  CHECK(rel(got, want) < 1e-11);
}

TEST_CASE("ordered_exp: piecewise-constant composes exactly per direction") {
  Matrix e12 = m2(0, 1, 0, 0), e21 = m2(0, 0, 1, 0);
  auto L = MatrixFunction::piecewise_constant({0.0, 1.0, 2.0}, {e12, e21});

  OrderedExpTask task;
  task.generator = L;
  task.a = 0;
  task.t = 2;
  Matrix got_T = ordered_exp(task).value;
  CHECK(rel(got_T, m2(1, 1, 1, 2)) < 1e-12);  // exp(E21) exp(E12)

  task.direction = Direction::T0;
  Matrix got_T0 = ordered_exp(task).value;
  CHECK(rel(got_T0, m2(2, 1, 1, 1)) < 1e-12);  // exp(E12) exp(E21)
}

TEST_CASE("ordered_exp: identity at t == a, reversal for t < a") {
  std::mt19937_64 rng(5);
  auto L = random_smooth(rng, 3);
  CHECK(rel(ordered_exp_value(L, 0.4, 0.4), Matrix::Identity(3, 3)) == 0.0);
  // E(t<-a) must invert E(a<-t)
  Matrix fwd = ordered_exp_value(L, 0.2, 1.1);
  Matrix bwd = ordered_exp_value(L, 1.1, 0.2);
  CHECK(rel(Matrix(fwd * bwd), Matrix::Identity(3, 3)) < 5e-10);
}

TEST_CASE("ordered_exp satisfies its defining ODEs") {
  std::mt19937_64 rng(11);
  auto L = random_smooth(rng, 3);
  double a = 0.0, t = 0.9, h = 1e-4;
  Matrix Et = ordered_exp_value(L, a, t);
  Matrix dE = (ordered_exp_value(L, a, t + h) - ordered_exp_value(L, a, t - h)) / (2 * h);
  CHECK((dE - L(t) * Et).norm() < 1e-6);  // dE/dt = L E

  Matrix Nt = ordered_exp_value(L, a, t, Direction::T0);
  Matrix dN = (ordered_exp_value(L, a, t + h, Direction::T0) -
               ordered_exp_value(L, a, t - h, Direction::T0)) /
              (2 * h);
  CHECK((dN - Nt * L(t)).norm() < 1e-6);  // dN/dt = N L
}

TEST_CASE("group and inverse laws") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    auto L = random_smooth(rng, 3);
    double a = 0.1, b = 0.6, t = 1.3;
    Matrix whole = ordered_exp_value(L, a, t);
    Matrix parts = ordered_exp_value(L, b, t) * ordered_exp_value(L, a, b);
    CHECK(rel(whole, parts) < 5e-10);

    Matrix inv = ordered_exp_value(L, a, t, Direction::T0, -1.0);
    CHECK(rel(Matrix(inv * whole), Matrix::Identity(3, 3)) < 5e-10);
    CHECK(rel(Matrix(whole * inv), Matrix::Identity(3, 3)) < 5e-10);

    Matrix rev_whole = ordered_exp_value(L, a, t, Direction::T0);
    Matrix rev_parts = ordered_exp_value(L, a, b, Direction::T0) *
                       ordered_exp_value(L, b, t, Direction::T0);
    CHECK(rel(rev_whole, rev_parts) < 5e-10);
  }
}

TEST_CASE("dyson partial sums") {
  Matrix L = m2(0.4, -0.7, 0.9, -0.1);
  auto Lf = MatrixFunction::constant(L);
  CHECK(rel(dyson_partial_sum(Lf, 0, 1, 0, 8), Matrix::Identity(2, 2)) == 0.0);
  CHECK(rel(dyson_partial_sum(Lf, 0, 0.8, 1, 8), Matrix(Matrix::Identity(2, 2) + 0.8 * L)) <
        1e-13);

  // truncation error scales as (t-a)^(k+1): least-squares log-log slope
  std::mt19937_64 rng(23);
  auto R = random_smooth(rng, 3, 3.0);
  int k = 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int np = 5;
  for (int i = 0; i < np; ++i) {
    double t = 0.32 / (1 << i);
    double err = (dyson_partial_sum(R, 0, t, k, 16) -
                  ordered_exp_value(R, 0, t, Direction::T, 1.0, 1e-12))
                     .norm();
    double lx = std::log(t), ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
  CHECK(std::fabs(slope - (k + 1)) < 0.25);

  // T0 variant reverses factor order: close to the T0 product integral and
  // measurably closer to it than the same-order T sum is
  Matrix t0sum = dyson_partial_sum(R, 0, 0.5, 4, 16, Direction::T0);
  Matrix tsum = dyson_partial_sum(R, 0, 0.5, 4, 16, Direction::T);
  Matrix t0ref = ordered_exp_value(R, 0, 0.5, Direction::T0);
  CHECK((t0sum - t0ref).norm() < 5e-3);
  CHECK((t0sum - t0ref).norm() * 5 < (tsum - t0ref).norm());
  CHECK_THROWS(dyson_partial_sum(Lf, 0, 1, 3, 0));
}

TEST_CASE("solve_linear_inhomogeneous") {
  // L = 0, constant source: pure integration
  auto L0 = MatrixFunction::constant(Matrix::Zero(2, 2));
  Vector v(2), phi(2);
  v << 1, -2;
  phi << 0.5, 2.0;
  Vector u = solve_linear_inhomogeneous(
      L0, [&](double) { return phi; }, v, 0, 1.5);
  CHECK((u - (v + 1.5 * phi)).norm() < 1e-12);

  // zero source: homogeneous reduction
  Matrix L = m2(0.3, 0.2, -0.4, 0.1);
  auto Lf = MatrixFunction::constant(L);
  Vector uh = solve_linear_inhomogeneous(
      Lf, [&](double) { return Vector(Vector::Zero(2)); }, v, 0, 1.2);
  CHECK((uh - matrix_exp(Matrix(1.2 * L)) * v).norm() < 1e-10);

  // constant L and phi: variation-of-constants closed form
  Matrix Ld = m2(1.0, 0, 0, 2.0);
  Vector want(2);
  double T = 0.9;
  want << std::exp(T) * v[0] + (std::exp(T) - 1) * phi[0],
      std::exp(2 * T) * v[1] + (std::exp(2 * T) - 1) / 2 * phi[1];
  Vector ui = solve_linear_inhomogeneous(
      MatrixFunction::constant(Ld), [&](double) { return phi; }, v, 0, T);
  CHECK((ui - want).norm() < 1e-9);
}

TEST_CASE("sylvester-type operator ODE") {
  Matrix K0 = m2(1, 2, -1, 0.5);

  // constant a, c with b = 0 factorizes
  Matrix A = m2(0.2, -0.3, 0.1, 0.4), C = m2(-0.1, 0.6, 0.2, 0.0);
  double T = 1.1;
  Matrix got = solve_operator_sylvester(MatrixFunction::constant(A),
                                        MatrixFunction::constant(Matrix::Zero(2, 2)),
                                        MatrixFunction::constant(C), K0, 0, T);
  Matrix want = matrix_exp(Matrix(T * A)) * K0 * matrix_exp(Matrix(T * C));
  CHECK(rel(got, want) < 1e-9);

  // a = c = 0: plain integral of b
  Matrix B = m2(0.3, 1.0, -0.2, 0.1);
  got = solve_operator_sylvester(MatrixFunction::constant(Matrix::Zero(2, 2)),
                                 MatrixFunction::constant(B),
                                 MatrixFunction::constant(Matrix::Zero(2, 2)), K0, 0, T);
  CHECK(rel(got, Matrix(K0 + T * B)) < 1e-10);

  // random time-dependent coefficients against direct adaptive integration
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    auto af = random_smooth(rng, 2), bf = random_smooth(rng, 2), cf = random_smooth(rng, 2);
    Matrix formula = solve_operator_sylvester(af, bf, cf, K0, 0, 0.9, 1e-11);

    chronexp::ode::Field fld = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
      Matrix K = Eigen::Map<const Matrix>(y.data(), 2, 2);
      Matrix dK = af(t) * K + K * cf(t) + bf(t);
      dy = Eigen::Map<const Eigen::VectorXd>(dK.data(), 4);
    };
    Eigen::VectorXd y0 = Eigen::Map<const Eigen::VectorXd>(K0.data(), 4);
    auto out = chronexp::ode::integrate(fld, 0, 0.9, y0);
    REQUIRE(out.ok);
    Matrix direct = Eigen::Map<const Matrix>(out.y.data(), 2, 2);
    CHECK(rel(formula, direct) < 1e-8);
  }
}

TEST_CASE("parameter derivative") {
  // commuting family A = alpha*M: derivative is (t-a) M exp((t-a) alpha0 M)
  Matrix M = m2(0.4, -0.2, 0.3, 0.1);
  double alpha0 = 0.7, T = 1.3;
  Matrix got = parameter_derivative(MatrixFunction::constant(Matrix(alpha0 * M)),
                                    MatrixFunction::constant(M), 0, T);
  Matrix want = T * M * matrix_exp(Matrix(T * alpha0 * M));
  CHECK(rel(got, want) < 1e-9);

  // vanishing partial
  Matrix zero = parameter_derivative(MatrixFunction::constant(M),
                                     MatrixFunction::constant(Matrix::Zero(2, 2)), 0, T);
  CHECK(zero.norm() < 1e-12);

  // expression family A(t, alpha) = M1 + alpha t M2 vs central differences
  ExprMatrix fam = ExprMatrix::parse({{"0.2 + alpha*t*0.4", "-0.3*t"},
                                      {"0.1 + alpha*t", "0.5 - alpha*t*0.2"}});
  Matrix deriv = parameter_derivative(fam, "t", "alpha", alpha0, 0, T);
  auto E_at = [&](double al) {
    return ordered_exp_value(
        MatrixFunction::from_expressions(fam, "t", {{"alpha", al}}), 0, T);
  };
  double d1 = (E_at(alpha0 + 1e-2) - E_at(alpha0 - 1e-2)).norm() / 0.02;
  (void)d1;
  Matrix fd1 = (E_at(alpha0 + 1e-2) - E_at(alpha0 - 1e-2)) / 2e-2;
  Matrix fd2 = (E_at(alpha0 + 5e-3) - E_at(alpha0 - 5e-3)) / 1e-2;
  double e1 = (fd1 - deriv).norm(), e2 = (fd2 - deriv).norm();
  CHECK(e2 < e1);
  double order = std::log2(e1 / e2);
  CHECK(order >= 1.9);
}

TEST_CASE("propagator cache matches fresh evaluations") {
  std::mt19937_64 rng(41);
  auto L = random_smooth(rng, 3, 1.5);
  Propagator prop(L, 0.0, 1.5, 1e-11);
  for (double tau : {0.0, 0.2371, 0.75, 1.0, 1.49999, 1.5}) {
    Matrix fresh = ordered_exp_value(L, 0, tau, Direction::T, 1.0, 1e-12);
    CHECK(rel(prop.forward(tau), fresh) < 5e-10);
    CHECK(rel(Matrix(prop.inverse(tau) * fresh), Matrix::Identity(3, 3)) < 5e-10);
  }
}
