#pragma once

// Real-data preparation: Tucker rank selection by captured energy, Tucker
// smoothing, and the invertible shift/scale transform applied before solving.

#include "tslto/tensor.hpp"
#include "tslto/tucker.hpp"

namespace tslto {

struct RankCriterion {
  /// Share of the total squared singular values the kept ones must reach.
  double theta = 0.95;
  void validate() const;
};

/// Per mode, the smallest l whose top-l squared singular values reach
/// theta of the total. Throws std::invalid_argument for a zero tensor.
Ranks select_rank(const Tensor3& x, const RankCriterion& criterion = {});

/// Truncated HOSVD at `ranks`, reconstructed.
Tensor3 tucker_smooth(const Tensor3& x, const Ranks& ranks);

struct ScaleTransform {
  double shift = 20.0;
  double core_scale = 0.14;
  Ranks ranks{2, 5, 6};
  void validate() const;
};

/// HOSVD of (x - shift) at t.ranks with the core multiplied by core_scale.
Tensor3 scale_transform(const Tensor3& x, const ScaleTransform& t);
/// HOSVD of x at t.ranks with the core divided by core_scale, plus shift.
Tensor3 scale_revert(const Tensor3& x, const ScaleTransform& t);

struct IngestedData {
  Tensor3 values;
  ObservationMask observed;
};

/// Raw data that encodes missing readings as zeros: the mask is the set of
/// nonzero entries.
IngestedData ingest_zero_as_missing(Tensor3 raw);

}  // namespace tslto
