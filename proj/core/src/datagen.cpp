#include "tslto/datagen.hpp"

#include "tslto/io.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

namespace tslto {

void SyntheticSpec::validate() const {
  for (Index d : dims) {
    if (d < 2) throw std::invalid_argument("SyntheticSpec: dims must be >= 2");
  }
  check_ranks(core_ranks, dims);
  if (!(core_high >= core_low)) throw std::invalid_argument("SyntheticSpec: core_high < core_low");
  for (Index d : dims) {
    if (distinctive_rows < 0 || distinctive_rows > d) {
      throw std::invalid_argument("SyntheticSpec: distinctive_rows out of range");
    }
  }
  const Index cols = dims[1] * dims[2];
  if (blocks.count < 0) throw std::invalid_argument("SyntheticSpec: block_count must be >= 0");
  if (blocks.count > 0) {
    if (blocks.rows < 1 || blocks.cols < 1 || blocks.rows > dims[0] || blocks.cols > cols) {
      throw std::invalid_argument("SyntheticSpec: block shape does not fit the mode-1 unfolding");
    }
    if (blocks.count * blocks.rows * blocks.cols > dims[0] * cols) {
      throw std::invalid_argument("SyntheticSpec: blocks cover more than the tensor");
    }
  }
  if (!(blocks.variance >= 0.0)) throw std::invalid_argument("SyntheticSpec: negative variance");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) {
    throw std::invalid_argument("SyntheticSpec: missing_rate must lie in [0, 1)");
  }
}

Matrix piecewise_constant_factor(Index rows, Index rank, Index distinctive, Rng& rng) {
  Matrix u(rows, rank);
  for (Index seg = 0; seg < rank; ++seg) {
    const Index begin = seg * rows / rank;
    const Index end = (seg + 1) * rows / rank;
    Vector level(rank);
    for (Index j = 0; j < rank; ++j) level[j] = rng.uniform01();
    for (Index i = begin; i < end; ++i) u.row(i) = level.transpose();
  }
  // Partial Fisher-Yates picks distinct rows.
  std::vector<Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), Index{0});
  for (Index k = 0; k < distinctive; ++k) {
    const auto pick = k + static_cast<Index>(rng.index(static_cast<std::uint64_t>(rows - k)));
    std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(pick)]);
    const Index row = order[static_cast<std::size_t>(k)];
    for (Index j = 0; j < rank; ++j) u(row, j) = rng.uniform01();
  }
  for (Index j = 0; j < rank; ++j) {
    const double n = u.col(j).norm();
    if (n > 0.0) u.col(j) /= n;
  }
  return u;
}

AnomalyBlocks place_anomaly_blocks(const Dims& dims, const BlockSpec& spec, Rng& rng) {
  AnomalyBlocks out{Tensor3::zeros(dims), ObservationMask::none(dims)};
  if (spec.count == 0) return out;
  const Index n_rows = dims[0];
  const Index n_cols = dims[1] * dims[2];
  const double sd = std::sqrt(spec.variance);
  auto unfolding = out.values.mode1();
  const Index max_attempts = 10 * spec.count;
  Index placed = 0;
  for (Index attempt = 0; attempt < max_attempts && placed < spec.count; ++attempt) {
    const auto top = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n_rows - spec.rows + 1)));
    const auto left = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n_cols - spec.cols + 1)));
    bool free = true;
    for (Index c = left; c < left + spec.cols && free; ++c) {
      for (Index r = top; r < top + spec.rows; ++r) {
        // Mode-1 unfolding entry (r, c) has linear offset r + D1 * c.
        if (out.support[r + n_rows * c]) {
          free = false;
          break;
        }
      }
    }
    if (!free) continue;
    for (Index c = left; c < left + spec.cols; ++c) {
      for (Index r = top; r < top + spec.rows; ++r) {
        unfolding(r, c) = rng.normal(spec.mean, sd);
        out.support.set(r + n_rows * c, true);
      }
    }
    ++placed;
  }
  if (placed < spec.count) {
    throw PlacementError("could only place " + std::to_string(placed) + " of " +
                         std::to_string(spec.count) + " anomaly blocks after " +
                         std::to_string(max_attempts) + " attempts");
  }
  return out;
}

ObservationMask draw_observation_mask(const Dims& dims, double missing_rate, Rng& rng) {
  ObservationMask mask(dims);
  for (Index i = 0; i < mask.size(); ++i) mask.set(i, rng.uniform01() >= missing_rate);
  return mask;
}

SyntheticInstance generate(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticInstance inst;
  const auto& r = spec.core_ranks;
  inst.core = Tensor3({r[0], r[1], r[2]});
  for (Index i = 0; i < inst.core.size(); ++i) inst.core[i] = rng.uniform(spec.core_low, spec.core_high);
  for (int n = 0; n < 3; ++n) {
    inst.factors[n] = piecewise_constant_factor(spec.dims[n], r[n], spec.distinctive_rows, rng);
  }
  inst.lowrank = tucker_reconstruct(inst.core, inst.factors);
  AnomalyBlocks blocks = place_anomaly_blocks(spec.dims, spec.blocks, rng);
  inst.anomaly = std::move(blocks.values);
  inst.anomaly_truth = std::move(blocks.support);
  inst.full = inst.lowrank + inst.anomaly;
  inst.observed = draw_observation_mask(spec.dims, spec.missing_rate, rng);
  return inst;
}

SparsityReport sparsity_report(const SyntheticInstance& instance) {
  SparsityReport rep;
  for (int n = 0; n < 3; ++n) rep.factor_diff_rows[n] = l20_count(toeplitz_diff(instance.factors[n]));
  rep.anomaly_entries = l0_count(instance.anomaly);
  const auto total = static_cast<double>(instance.full.size());
  rep.anomaly_fraction = static_cast<double>(rep.anomaly_entries) / total;
  rep.observed_fraction = static_cast<double>(instance.observed.count()) / total;
  return rep;
}

void write_instance(const std::filesystem::path& dir, const SyntheticInstance& instance,
                    const SyntheticSpec& spec) {
  std::filesystem::create_directories(dir);
  write_tsr3(dir / "full.tsr3", instance.full);
  write_tsr3(dir / "lowrank.tsr3", instance.lowrank);
  write_tsr3(dir / "anomaly.tsr3", instance.anomaly);
  write_tsr3(dir / "observed.tsr3", project_observed(instance.full, instance.observed));
  write_mask(dir / "observed_mask.tsr3", instance.observed);
  write_mask(dir / "anomaly_mask.tsr3", instance.anomaly_truth);

  const SparsityReport rep = sparsity_report(instance);
  std::ofstream out(dir / "manifest.txt", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  // Shortest text that reads back to the same double.
  auto num = [](double v) {
    char buf[32];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
  };
  out << "seed=" << spec.seed << '\n'
      << "dims=" << spec.dims[0] << ',' << spec.dims[1] << ',' << spec.dims[2] << '\n'
      << "core_ranks=" << spec.core_ranks[0] << ',' << spec.core_ranks[1] << ','
      << spec.core_ranks[2] << '\n'
      << "core_low=" << num(spec.core_low) << '\n'
      << "core_high=" << num(spec.core_high) << '\n'
      << "distinctive_rows=" << spec.distinctive_rows << '\n'
      << "anomaly_mean=" << num(spec.blocks.mean) << '\n'
      << "anomaly_variance=" << num(spec.blocks.variance) << '\n'
      << "block_count=" << spec.blocks.count << '\n'
      << "block_rows=" << spec.blocks.rows << '\n'
      << "block_cols=" << spec.blocks.cols << '\n'
      << "missing_rate=" << num(spec.missing_rate) << '\n'
      << "anomaly_entries=" << rep.anomaly_entries << '\n'
      << "anomaly_ratio=" << num(rep.anomaly_fraction) << '\n'
      << "observed_fraction=" << num(rep.observed_fraction) << '\n'
      << "factor_diff_rows=" << rep.factor_diff_rows[0] << ',' << rep.factor_diff_rows[1] << ','
      << rep.factor_diff_rows[2] << '\n'
      << "file_full=full.tsr3\n"
      << "file_lowrank=lowrank.tsr3\n"
      << "file_anomaly=anomaly.tsr3\n"
      << "file_observed=observed.tsr3\n"
      << "file_observed_mask=observed_mask.tsr3\n"
      << "file_anomaly_mask=anomaly_mask.tsr3\n";
}

}  // namespace tslto
