#include "tslto/preprocess.hpp"

#include <cmath>
#include <stdexcept>

namespace tslto {

namespace {

Tensor3 scaled_hosvd(const Tensor3& x, const Ranks& ranks, double core_scale) {
  TuckerFactors tf = hosvd(x, ranks);
  tf.core *= core_scale;
  return tucker_reconstruct(tf.core, tf.factors);
}

}  // namespace

void RankCriterion::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("rank criterion theta must lie in (0, 1]");
  }
}

Ranks select_rank(const Tensor3& x, const RankCriterion& criterion) {
  criterion.validate();
  if (x.empty() || x.squared_norm() == 0.0) {
    throw std::invalid_argument("select_rank: tensor is zero");
  }
  Ranks out{};
  for (int mode = 1; mode <= 3; ++mode) {
    const Vector sq = squared_singular_values(x, mode);
    const double total = sq.sum();
    double acc = 0.0;
    Index r = sq.size();
    for (Index l = 0; l < sq.size(); ++l) {
      acc += sq[l];
      if (acc >= criterion.theta * total) {
        r = l + 1;
        break;
      }
    }
    out[mode - 1] = r;
  }
  return out;
}

Tensor3 tucker_smooth(const Tensor3& x, const Ranks& ranks) {
  return scaled_hosvd(x, ranks, 1.0);
}

void ScaleTransform::validate() const {
  if (core_scale == 0.0 || !std::isfinite(core_scale)) {
    throw std::invalid_argument("scale transform core_scale must be finite and nonzero");
  }
  if (!std::isfinite(shift)) throw std::invalid_argument("scale transform shift must be finite");
}

Tensor3 scale_transform(const Tensor3& x, const ScaleTransform& t) {
  t.validate();
  check_ranks(t.ranks, x.dims());
  return scaled_hosvd(x - Tensor3::constant(x.dims(), t.shift), t.ranks, t.core_scale);
}

Tensor3 scale_revert(const Tensor3& x, const ScaleTransform& t) {
  t.validate();
  check_ranks(t.ranks, x.dims());
  return scaled_hosvd(x, t.ranks, 1.0 / t.core_scale) + Tensor3::constant(x.dims(), t.shift);
}

IngestedData ingest_zero_as_missing(Tensor3 raw) {
  ObservationMask mask = ObservationMask::from_nonzeros(raw);
  return {std::move(raw), std::move(mask)};
}

}  // namespace tslto
