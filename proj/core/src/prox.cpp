#include "tslto/prox.hpp"

#include <cmath>
#include <stdexcept>

namespace tslto {

ProxWeight::ProxWeight(double t) : t_(t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("proximal weight must be finite and nonnegative");
  }
}

void hard_threshold_l0_inplace(Eigen::Ref<Vector> x, ProxWeight t) {
  const double cut = 2.0 * t.value();
  x = (x.array().square() <= cut).select(0.0, x);
}

Matrix hard_threshold_l0(const Matrix& x, ProxWeight t) {
  const double cut = 2.0 * t.value();
  return (x.array().square() <= cut).select(0.0, x);
}

Tensor3 hard_threshold_l0(const Tensor3& x, ProxWeight t) {
  Tensor3 out = x;
  hard_threshold_l0_inplace(out.values(), t);
  return out;
}

Matrix group_hard_threshold_l20(const Matrix& x, ProxWeight t) {
  const double cut = 2.0 * t.value();
  Matrix out = x;
  for (Index j = 0; j < out.rows(); ++j) {
    if (out.row(j).squaredNorm() <= cut) out.row(j).setZero();
  }
  return out;
}

}  // namespace tslto
