#include "tslto/tucker.hpp"

#include <Eigen/Eigenvalues>

#include <stdexcept>
#include <string>

namespace tslto {

namespace {

Matrix unfolding_gram(const Tensor3& x, int mode) {
  if (mode == 1) {
    const auto m = x.mode1();
    Matrix gram = Matrix::Zero(m.rows(), m.rows());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(m);
    return gram.selfadjointView<Eigen::Lower>();
  }
  const Matrix m = unfold(x, mode);
  Matrix gram = Matrix::Zero(m.rows(), m.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(m);
  return gram.selfadjointView<Eigen::Lower>();
}

}  // namespace

void check_ranks(const Ranks& ranks, const Dims& dims) {
  for (int n = 0; n < 3; ++n) {
    if (ranks[n] < 1 || ranks[n] > dims[n]) {
      throw std::invalid_argument("rank " + std::to_string(ranks[n]) + " invalid for mode " +
                                  std::to_string(n + 1) + " of size " + std::to_string(dims[n]));
    }
  }
}

Vector squared_singular_values(const Tensor3& x, int mode) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(unfolding_gram(x, mode), Eigen::EigenvaluesOnly);
  // Ascending from Eigen; reverse and clamp roundoff negatives.
  return eig.eigenvalues().reverse().cwiseMax(0.0);
}

Matrix leading_left_singular_vectors(const Tensor3& x, int mode, Index rank) {
  const Index d = x.dim(mode);
  if (rank < 1 || rank > d) throw std::invalid_argument("leading_left_singular_vectors: bad rank");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(unfolding_gram(x, mode));
  Matrix u = eig.eigenvectors().rightCols(rank).rowwise().reverse();
  for (Index j = 0; j < rank; ++j) {
    Index arg = 0;
    u.col(j).cwiseAbs().maxCoeff(&arg);
    if (u(arg, j) < 0.0) u.col(j) = -u.col(j);
  }
  return u;
}

TuckerFactors hosvd(const Tensor3& x, const Ranks& ranks) {
  check_ranks(ranks, x.dims());
  TuckerFactors out;
  for (int n = 0; n < 3; ++n) out.factors[n] = leading_left_singular_vectors(x, n + 1, ranks[n]);
  out.core = tucker_project(x, out.factors);
  return out;
}

}  // namespace tslto
