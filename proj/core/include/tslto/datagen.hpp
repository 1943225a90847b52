#pragma once

// Synthetic spatiotemporal tensors: a Tucker low-rank part with
// piecewise-constant factors, block-sparse anomalies in the mode-1 unfolding,
// and a uniformly random observation mask.

#include "tslto/random.hpp"
#include "tslto/tensor.hpp"
#include "tslto/tucker.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>

namespace tslto {

class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BlockSpec {
  Index count = 50;
  Index rows = 2;    // consecutive mode-1 rows
  Index cols = 125;  // consecutive mode-1 unfolding columns
  double mean = 4.0;
  double variance = 0.01;
};

struct SyntheticSpec {
  Dims dims{50, 50, 50};
  Ranks core_ranks{3, 3, 3};
  double core_low = 0.0;
  double core_high = 100.0;
  Index distinctive_rows = 2;
  BlockSpec blocks;
  double missing_rate = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticInstance {
  Tensor3 full;     // lowrank + anomaly
  Tensor3 lowrank;
  Tensor3 anomaly;
  ObservationMask observed;
  ObservationMask anomaly_truth;
  Tensor3 core;
  std::array<Matrix, 3> factors;
};

/// Deterministic in spec (including the seed). Draw order: core, factors,
/// anomaly blocks, mask.
SyntheticInstance generate(const SyntheticSpec& spec);

/// rows x r factor: `ranks` contiguous constant segments, then
/// `distinctive` distinct rows redrawn, then unit-norm columns. Entries U(0,1).
Matrix piecewise_constant_factor(Index rows, Index rank, Index distinctive, Rng& rng);

struct AnomalyBlocks {
  Tensor3 values;
  ObservationMask support;
};

/// Non-overlapping axis-aligned blocks in the mode-1 unfolding, top-left
/// corners uniform over admissible positions, overlaps rejected. Gives up
/// with PlacementError after 10 * count attempts.
AnomalyBlocks place_anomaly_blocks(const Dims& dims, const BlockSpec& spec, Rng& rng);

/// Each entry is missing independently with probability `missing_rate`.
ObservationMask draw_observation_mask(const Dims& dims, double missing_rate, Rng& rng);

struct SparsityReport {
  std::array<Index, 3> factor_diff_rows{};  // l2,0 of T_i U_i
  Index anomaly_entries = 0;
  double anomaly_fraction = 0.0;
  double observed_fraction = 0.0;
};

SparsityReport sparsity_report(const SyntheticInstance& instance);

/// Writes full/lowrank/anomaly/observed tensors, the two masks and a
/// key=value manifest into `dir`.
void write_instance(const std::filesystem::path& dir, const SyntheticInstance& instance,
                    const SyntheticSpec& spec);

}  // namespace tslto
