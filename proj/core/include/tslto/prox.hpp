#pragma once

// Proximal maps of the l0 and l2,0 penalties. Both are exact: for each entry
// (or row) the minimizer of t*||z||_0 + 0.5*||z - x||^2 is either 0 or x, and
// ties at x^2 == 2t resolve to 0.

#include "tslto/tensor.hpp"

namespace tslto {

/// A nonnegative proximal weight (mu2/gamma, lambda_i/alpha_i, step*mu1, ...).
class ProxWeight {
 public:
  explicit ProxWeight(double t);
  double value() const { return t_; }

 private:
  double t_;
};

/// Entrywise hard threshold: 0 where x^2 <= 2t, x elsewhere.
Matrix hard_threshold_l0(const Matrix& x, ProxWeight t);
Tensor3 hard_threshold_l0(const Tensor3& x, ProxWeight t);
void hard_threshold_l0_inplace(Eigen::Ref<Vector> x, ProxWeight t);

/// Row-wise group hard threshold: row j becomes 0 where ||x_j||^2 <= 2t.
Matrix group_hard_threshold_l20(const Matrix& x, ProxWeight t);

}  // namespace tslto
