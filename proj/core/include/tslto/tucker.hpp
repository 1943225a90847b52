#pragma once

// Truncated higher-order SVD.

#include "tslto/tensor.hpp"

#include <array>

namespace tslto {

using Ranks = std::array<Index, 3>;

struct TuckerFactors {
  Tensor3 core;
  std::array<Matrix, 3> factors;
};

/// Squared singular values of unfold(x, mode), descending. Computed from the
/// eigenvalues of the D_n x D_n Gram matrix.
Vector squared_singular_values(const Tensor3& x, int mode);

/// The leading `rank` left singular vectors of unfold(x, mode). Each column's
/// largest-magnitude entry is made positive so results are deterministic.
Matrix leading_left_singular_vectors(const Tensor3& x, int mode, Index rank);

/// Factors from the leading singular vectors of each unfolding, core from
/// projecting x onto them.
TuckerFactors hosvd(const Tensor3& x, const Ranks& ranks);

void check_ranks(const Ranks& ranks, const Dims& dims);

}  // namespace tslto
