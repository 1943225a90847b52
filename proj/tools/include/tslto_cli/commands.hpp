#pragma once

// Subcommands of the `tslto` tool. Each reads a resolved RunConfig, writes its
// outputs under `out` together with config.resolved, and reports progress to
// `log`. Errors surface as exceptions: UsageError for bad configuration,
// anything else is a runtime failure.

#include "tslto_cli/run_config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tslto::cli {

/// Writes the synthetic instance files and manifest.txt.
void cmd_generate(const RunConfig& cfg, std::ostream& log);

/// Writes recovered.tsr3, lowrank.tsr3, anomaly.tsr3, trace.csv and
/// summary.txt.
void cmd_solve(const RunConfig& cfg, std::ostream& log);

/// Writes metrics.csv (one row).
void cmd_evaluate(const RunConfig& cfg, std::ostream& log);

/// Runs the `op` key on `input`.
void cmd_preprocess(const RunConfig& cfg, std::ostream& log);

/// Writes ablation.csv with one row per requested variant.
void cmd_ablate(const RunConfig& cfg, std::ostream& log);

/// Writes grid.csv (long format) and one cell_NNNN directory per cell.
void cmd_grid(const RunConfig& cfg, std::ostream& log);

// Building blocks shared by the subcommands and the acceptance suite.

struct Evaluation {
  ImputationMetrics imputation;
  DetectionMetrics detection;
};

Evaluation evaluate(const Tensor3& truth, const ObservationMask& anomaly_truth,
                    const ObservationMask& omega, const Tensor3& recovered,
                    const Tensor3& anomaly, EvalScope scope, const DetectionRule& rule);

struct PipelineResult {
  Evaluation evaluation;
  int iterations = 0;
  bool converged = false;
};

/// Solve the observed part of `instance` and score it against the instance.
PipelineResult solve_and_evaluate(const SyntheticInstance& instance, const SolverConfig& solver,
                                  EvalScope scope, const DetectionRule& rule);

/// Ablations: each lettered variant zeroes a subset of the regulariser
/// weights. "full" keeps them all.
struct AblationVariant {
  std::string label;
  std::string description;
  bool drop_group = false;         // lambda
  bool drop_sparsity = false;      // mu1
  bool drop_block_sparsity = false;  // mu2
};

const std::vector<AblationVariant>& ablation_variants();
std::optional<AblationVariant> find_variant(const std::string& label);
SolverConfig apply_variant(SolverConfig cfg, const AblationVariant& variant);

/// Shortest round-trip text for a double, as used in every CSV.
std::string format_number(double v);

/// Header line of metrics.csv.
std::string metrics_csv_header();
std::string metrics_csv_row(const Evaluation& e, EvalScope scope, const DetectionRule& rule);

}  // namespace tslto::cli
