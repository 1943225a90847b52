#pragma once

// Objectives of the factor-matrix subproblems
//   min_{U_n on St}  beta/2 ||[[G; U1, U2, U3]] - L||^2
//                    + <Y_n - T U_n, V_n> + alpha_n/2 ||Y_n - T U_n||^2.

#include "tslto/stiefel.hpp"
#include "tslto/tensor.hpp"

#include <array>

namespace tslto {

using Factors = std::array<Matrix, 3>;

/// beta/2 ||[[G; U1, U2, U3]] - L||_F^2.
double fbeta_value(const Tensor3& core, const Factors& factors, const Tensor3& target, double beta);

/// Gradient of fbeta_value with respect to U_mode, e.g. for mode 1
/// beta * ([[G; U]] - L)_(1) * kron(U3, U2) * G_(1)^T. The Kronecker factor is
/// applied through mode products. Valid for any factors, orthonormal or not.
Matrix grad_fbeta_U(const Tensor3& core, const Factors& factors, const Tensor3& target,
                    double beta, int mode);

/// Multiplier and penalty terms that couple U_n to Y_n = T U_n.
struct DifferenceCoupling {
  Matrix y;  // (D_n - 1) x r_n
  Matrix v;  // (D_n - 1) x r_n
  double alpha = 0.0;
};

double coupling_value(const Matrix& u, const DifferenceCoupling& c);

/// Full subproblem value.
double u_subproblem_value(const Tensor3& core, const Factors& factors, const Tensor3& target,
                          double beta, int mode, const DifferenceCoupling& c);

/// grad_fbeta_U - T^T (V + alpha (Y - T U)).
Matrix grad_U_subproblem(const Tensor3& core, const Factors& factors, const Tensor3& target,
                         double beta, int mode, const DifferenceCoupling& c);

/// The same subproblem with the other two factors held fixed on the manifold.
/// Because kron(U_k, U_j) then has orthonormal columns, the data term reduces to
///   beta/2 (tr(U^T U Gram) - 2 <U, Cross> + ||L||^2)
/// with Gram = G_(n) G_(n)^T and Cross = (L x_{k != n} U_k^T)_(n) G_(n)^T, so
/// value and gradient cost O(D r^2) per evaluation.
class FactorSubproblem {
 public:
  FactorSubproblem(const Tensor3& core, const Factors& factors, const Tensor3& target,
                   double beta, int mode, DifferenceCoupling coupling);

  double value(const Matrix& u) const;
  Matrix gradient(const Matrix& u) const;
  SmoothObjective objective() const;

 private:
  double beta_;
  Matrix gram_;
  Matrix cross_;
  double target_sq_;
  DifferenceCoupling coupling_;
};

}  // namespace tslto
