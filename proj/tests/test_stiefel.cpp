#include "test_helpers.hpp"
#include "tslto/errors.hpp"
#include "tslto/stiefel.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tslto;
using tslto::testing::random_matrix;
using tslto::testing::random_orthonormal;

namespace {

// f(U) = -tr(U^T A U) for symmetric A; minimized by the leading eigenvectors.
SmoothObjective trace_objective(const Matrix& a) {
  return {[a](const Matrix& u) { return -(u.transpose() * a * u).trace(); },
          [a](const Matrix& u) -> Matrix { return -2.0 * a * u; }};
}

}  // namespace

TEST(Cayley, CurveStaysOnManifoldForAnyStep) {
  Rng rng(2);
  for (Index r : {1, 2, 4}) {
    for (Index d : {5, 8, 12}) {
      if (r > d) continue;
      Matrix u = random_orthonormal(d, r, rng);
      Matrix g = random_matrix(d, r, rng);
      for (double tau : {1e-6, 0.1, 1.0, 37.0, 1e4}) {
        EXPECT_LE(orthonormality_error(cayley_point(u, g, tau)), 1e-10)
            << "d=" << d << " r=" << r << " tau=" << tau;
      }
      EXPECT_LE((cayley_point(u, g, 0.0) - u).norm(), 1e-14);
    }
  }
}

TEST(Cayley, LowRankFormMatchesDenseSolve) {
  Rng rng(4);
  const Index d = 9, r = 2;
  Matrix u = random_orthonormal(d, r, rng);
  Matrix g = random_matrix(d, r, rng);
  const double tau = 0.7;
  Matrix a = g * u.transpose() - u * g.transpose();
  Matrix id = Matrix::Identity(d, d);
  Matrix dense = (id + 0.5 * tau * a).lu().solve((id - 0.5 * tau * a) * u);
  EXPECT_LE((cayley_point(u, g, tau) - dense).norm(), 1e-12);
}

TEST(Cayley, InitialSlopeIsNegativeProjectedGradientNorm) {
  Rng rng(6);
  const Index d = 7, r = 3;
  Matrix a_sym = random_matrix(d, d, rng);
  a_sym = (a_sym + a_sym.transpose()).eval();
  SmoothObjective f = trace_objective(a_sym);
  Matrix u = random_orthonormal(d, r, rng);
  Matrix g = f.gradient(u);
  const double h = 1e-6;
  const double slope = (f.value(cayley_point(u, g, h)) - f.value(cayley_point(u, g, -h))) / (2 * h);
  const Matrix ug = u.transpose() * g;
  const double expected = -(g.squaredNorm() - (ug * ug).trace());
  EXPECT_NEAR(slope, expected, 1e-5 * (1.0 + std::abs(expected)));
}

TEST(Stiefel, FindsLeadingEigenspace) {
  Rng rng(7);
  const Index d = 10, r = 3;
  Vector eig(d);
  for (Index i = 0; i < d; ++i) eig[i] = static_cast<double>(d - i);
  Matrix q = random_orthonormal(d, d, rng);
  Matrix a = q * eig.asDiagonal() * q.transpose();
  StiefelOptions opts;
  opts.max_iters = 500;
  StiefelResult res = minimize_on_stiefel(trace_objective(a), random_orthonormal(d, r, rng), opts);
  EXPECT_NEAR(res.value, -(10.0 + 9.0 + 8.0), 1e-6);
  EXPECT_LE(orthonormality_error(res.u), 1e-8);
  EXPECT_LE(res.value, res.initial_value);
}

TEST(Stiefel, IteratesStayOrthonormalAndValuesDecrease) {
  Rng rng(8);
  const Index d = 15, r = 2;
  Matrix target = random_matrix(d, r, rng);
  SmoothObjective f{[&](const Matrix& u) { return 0.5 * (u - target).squaredNorm(); },
                    [&](const Matrix& u) -> Matrix { return u - target; }};
  Matrix u = random_orthonormal(d, r, rng);
  double prev = f.value(u);
  StiefelOptions opts;
  opts.max_iters = 1;
  for (int k = 0; k < 30; ++k) {
    StiefelResult res = minimize_on_stiefel(f, u, opts);
    EXPECT_LE(orthonormality_error(res.u), 1e-8);
    EXPECT_LE(res.value, prev + 1e-12);
    prev = res.value;
    u = res.u;
  }
}

TEST(Stiefel, RejectsNonOrthonormalStart) {
  SmoothObjective f{[](const Matrix& u) { return u.squaredNorm(); },
                    [](const Matrix& u) -> Matrix { return 2.0 * u; }};
  EXPECT_THROW(minimize_on_stiefel(f, Matrix::Ones(4, 2)), std::invalid_argument);
}

TEST(Stiefel, NonFiniteObjectiveIsReported) {
  SmoothObjective f{[](const Matrix&) { return std::nan(""); },
                    [](const Matrix& u) -> Matrix { return u; }};
  EXPECT_THROW(minimize_on_stiefel(f, orthonormal_basis(4, 2)), NumericalError);
}

TEST(Stiefel, ReorthonormalizeRepairsDrift) {
  Rng rng(9);
  Matrix u = random_orthonormal(6, 3, rng);
  Matrix drifted = u + 1e-6 * random_matrix(6, 3, rng);
  Matrix fixed = reorthonormalize(drifted);
  EXPECT_LE(orthonormality_error(fixed), 1e-13);
  EXPECT_LE((fixed - u).norm(), 1e-5);
  EXPECT_LE(orthonormality_error(orthonormal_basis(7, 3)), 1e-14);
}
