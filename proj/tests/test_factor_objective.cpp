#include "test_helpers.hpp"
#include "tslto/factor_objective.hpp"

#include <gtest/gtest.h>

using namespace tslto;
using tslto::testing::random_matrix;
using tslto::testing::random_orthonormal;
using tslto::testing::random_tensor;

namespace {

struct Instance {
  Tensor3 core;
  Factors factors;
  Tensor3 target;
  DifferenceCoupling coupling;
};

Instance make_instance(Rng& rng, int mode, bool orthonormal) {
  const Dims d{6, 5, 7};
  const Dims r{2, 3, 2};
  Instance in;
  in.core = random_tensor(r, rng);
  for (int n = 0; n < 3; ++n) {
    in.factors[n] = orthonormal ? random_orthonormal(d[n], r[n], rng) : random_matrix(d[n], r[n], rng);
  }
  in.target = random_tensor(d, rng);
  const int i = mode - 1;
  in.coupling.y = random_matrix(d[i] - 1, r[i], rng);
  in.coupling.v = random_matrix(d[i] - 1, r[i], rng);
  in.coupling.alpha = 3.5;
  return in;
}

// Central differences of f over every entry of factor `mode`.
template <typename F>
Matrix numeric_gradient(F&& f, Factors factors, int mode, double h = 1e-6) {
  Matrix& u = factors[mode - 1];
  Matrix g(u.rows(), u.cols());
  for (Index j = 0; j < u.cols(); ++j)
    for (Index i = 0; i < u.rows(); ++i) {
      const double keep = u(i, j);
      u(i, j) = keep + h;
      const double up = f(factors);
      u(i, j) = keep - h;
      const double down = f(factors);
      u(i, j) = keep;
      g(i, j) = (up - down) / (2 * h);
    }
  return g;
}

}  // namespace

TEST(FactorObjective, FbetaValueMatchesDefinition) {
  Rng rng(1);
  Instance in = make_instance(rng, 1, false);
  const double direct = 0.5 * 2.0 * (tucker_reconstruct(in.core, in.factors) - in.target).squared_norm();
  EXPECT_NEAR(fbeta_value(in.core, in.factors, in.target, 2.0), direct, 1e-10 * direct);
}

TEST(FactorObjective, FbetaGradientMatchesFiniteDifferences) {
  Rng rng(2);
  const double beta = 1.7;
  for (int mode = 1; mode <= 3; ++mode) {
    for (int trial = 0; trial < 10; ++trial) {
      Instance in = make_instance(rng, mode, false);
      auto f = [&](const Factors& fs) { return fbeta_value(in.core, fs, in.target, beta); };
      Matrix numeric = numeric_gradient(f, in.factors, mode);
      Matrix analytic = grad_fbeta_U(in.core, in.factors, in.target, beta, mode);
      EXPECT_LE((analytic - numeric).norm(), 1e-5 * (1.0 + numeric.norm())) << "mode " << mode;
    }
  }
}

TEST(FactorObjective, SubproblemGradientMatchesFiniteDifferences) {
  Rng rng(3);
  const double beta = 0.9;
  for (int mode = 1; mode <= 3; ++mode) {
    for (int trial = 0; trial < 10; ++trial) {
      Instance in = make_instance(rng, mode, false);
      auto f = [&](const Factors& fs) {
        return u_subproblem_value(in.core, fs, in.target, beta, mode, in.coupling);
      };
      Matrix numeric = numeric_gradient(f, in.factors, mode);
      Matrix analytic = grad_U_subproblem(in.core, in.factors, in.target, beta, mode, in.coupling);
      EXPECT_LE((analytic - numeric).norm(), 1e-5 * (1.0 + numeric.norm())) << "mode " << mode;
    }
  }
}

TEST(FactorObjective, ReducedFormAgreesWithFullFormOnManifold) {
  Rng rng(4);
  const double beta = 2.3;
  for (int mode = 1; mode <= 3; ++mode) {
    Instance in = make_instance(rng, mode, true);
    FactorSubproblem sub(in.core, in.factors, in.target, beta, mode, in.coupling);
    // Any U works: only the other factors must be orthonormal.
    Matrix u = random_matrix(in.factors[mode - 1].rows(), in.factors[mode - 1].cols(), rng);
    Factors fs = in.factors;
    fs[mode - 1] = u;
    const double full = u_subproblem_value(in.core, fs, in.target, beta, mode, in.coupling);
    EXPECT_NEAR(sub.value(u), full, 1e-9 * (1.0 + std::abs(full)));
    Matrix full_grad = grad_U_subproblem(in.core, fs, in.target, beta, mode, in.coupling);
    EXPECT_LE((sub.gradient(u) - full_grad).norm(), 1e-9 * (1.0 + full_grad.norm()));
  }
}

TEST(FactorObjective, CouplingGradientIsDifferenceAdjoint) {
  Rng rng(5);
  Instance in = make_instance(rng, 2, false);
  const Matrix& u = in.factors[1];
  Matrix g_full = grad_U_subproblem(in.core, in.factors, in.target, 1.0, 2, in.coupling) -
                  grad_fbeta_U(in.core, in.factors, in.target, 1.0, 2);
  Matrix expected = -toeplitz_diff_adjoint(in.coupling.v + in.coupling.alpha * (in.coupling.y - toeplitz_diff(u)));
  EXPECT_LE((g_full - expected).norm(), 1e-10 * (1.0 + expected.norm()));
}
