#include "tslto/factor_objective.hpp"

#include <stdexcept>

namespace tslto {

namespace {

void check_factors(const Tensor3& core, const Factors& factors, const Tensor3& target) {
  for (int n = 0; n < 3; ++n) {
    if (factors[n].cols() != core.dims()[n] || factors[n].rows() != target.dims()[n]) {
      throw std::invalid_argument("factor " + std::to_string(n + 1) +
                                  " does not conform with core and target");
    }
  }
}

// X x_k U_k^T for both modes k != mode.
Tensor3 project_other_modes(const Tensor3& x, const Factors& factors, int mode) {
  Tensor3 out = x;
  for (int k = 1; k <= 3; ++k) {
    if (k != mode) out = mode_n_product_transposed(out, factors[k - 1], k);
  }
  return out;
}

void check_coupling(const Matrix& u, const DifferenceCoupling& c) {
  if (c.y.rows() != u.rows() - 1 || c.y.cols() != u.cols() || c.v.rows() != c.y.rows() ||
      c.v.cols() != c.y.cols()) {
    throw std::invalid_argument("difference coupling shape does not match the factor");
  }
}

}  // namespace

double fbeta_value(const Tensor3& core, const Factors& factors, const Tensor3& target,
                   double beta) {
  check_factors(core, factors, target);
  return 0.5 * beta * (tucker_reconstruct(core, factors) - target).squared_norm();
}

Matrix grad_fbeta_U(const Tensor3& core, const Factors& factors, const Tensor3& target,
                    double beta, int mode) {
  check_factors(core, factors, target);
  const Tensor3 residual = tucker_reconstruct(core, factors) - target;
  return beta * unfold(project_other_modes(residual, factors, mode), mode) *
         unfold(core, mode).transpose();
}

double coupling_value(const Matrix& u, const DifferenceCoupling& c) {
  check_coupling(u, c);
  const Matrix gap = c.y - toeplitz_diff(u);
  return (gap.array() * c.v.array()).sum() + 0.5 * c.alpha * gap.squaredNorm();
}

double u_subproblem_value(const Tensor3& core, const Factors& factors, const Tensor3& target,
                          double beta, int mode, const DifferenceCoupling& c) {
  return fbeta_value(core, factors, target, beta) + coupling_value(factors[mode - 1], c);
}

Matrix grad_U_subproblem(const Tensor3& core, const Factors& factors, const Tensor3& target,
                         double beta, int mode, const DifferenceCoupling& c) {
  const Matrix& u = factors[mode - 1];
  check_coupling(u, c);
  return grad_fbeta_U(core, factors, target, beta, mode) -
         toeplitz_diff_adjoint(c.v + c.alpha * (c.y - toeplitz_diff(u)));
}

FactorSubproblem::FactorSubproblem(const Tensor3& core, const Factors& factors,
                                   const Tensor3& target, double beta, int mode,
                                   DifferenceCoupling coupling)
    : beta_(beta), target_sq_(target.squared_norm()), coupling_(std::move(coupling)) {
  check_factors(core, factors, target);
  check_coupling(factors[mode - 1], coupling_);
  const Matrix core_n = unfold(core, mode);
  gram_ = core_n * core_n.transpose();
  cross_ = unfold(project_other_modes(target, factors, mode), mode) * core_n.transpose();
}

double FactorSubproblem::value(const Matrix& u) const {
  const double data = (u.transpose() * u * gram_).trace() - 2.0 * (u.array() * cross_.array()).sum() +
                      target_sq_;
  return 0.5 * beta_ * data + coupling_value(u, coupling_);
}

Matrix FactorSubproblem::gradient(const Matrix& u) const {
  return beta_ * (u * gram_ - cross_) -
         toeplitz_diff_adjoint(coupling_.v + coupling_.alpha * (coupling_.y - toeplitz_diff(u)));
}

SmoothObjective FactorSubproblem::objective() const {
  return {[this](const Matrix& u) { return value(u); },
          [this](const Matrix& u) { return gradient(u); }};
}

}  // namespace tslto
