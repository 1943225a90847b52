#pragma once

// Imputation accuracy (RMSE, MAPE, MAE) and anomaly detection quality
// (precision, recall, F1).

#include "tslto/tensor.hpp"

#include <optional>
#include <string_view>

namespace tslto {

enum class EvalScope { kMissing, kAll, kNonAnomalous };
enum class DetectionMode { kEntry, kBlockOverlap };

EvalScope parse_scope(std::string_view name);
std::string_view to_string(EvalScope scope);
DetectionMode parse_detection_mode(std::string_view name);
std::string_view to_string(DetectionMode mode);

struct ImputationMetrics {
  Index count = 0;
  double rmse = 0.0;
  double mae = 0.0;
  /// Percent. Absent when every scored truth value is (numerically) zero.
  std::optional<double> mape;
  /// Entries left out of MAPE because |truth| < 1e-12.
  Index mape_skipped = 0;
};

/// Scores `estimate` against `truth` on the entries selected by `scope`:
/// kMissing scores entries outside `omega`, kNonAnomalous entries outside
/// `anomaly_truth` (required for that scope). Throws if the scope is empty.
ImputationMetrics imputation_metrics(const Tensor3& truth, const Tensor3& estimate,
                                     EvalScope scope, const ObservationMask& omega,
                                     const ObservationMask* anomaly_truth = nullptr);

struct DetectionRule {
  DetectionMode mode = DetectionMode::kEntry;
  /// Detected set is |R| > threshold.
  double threshold = 0.0;
};

struct DetectionMetrics {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 0.0;
  Index tp = 0;
  Index fp = 0;
  Index fn = 0;
};

/// Entry mode counts entries. Block-overlap mode groups detected and true
/// entries into 4-connected components of the mode-1 unfolding: a detected
/// component touching the truth is a TP, otherwise an FP; a true component
/// touched by no detection is an FN. Recall counts touched true components.
/// Precision is 1 with no detections, recall 1 with no true anomalies, and F1
/// is 0 when both are 0.
DetectionMetrics detection_metrics(const ObservationMask& truth, const Tensor3& anomaly,
                                   const DetectionRule& rule = {});

/// Detected set |R| > threshold as a mask.
ObservationMask detected_support(const Tensor3& anomaly, double threshold = 0.0);

}  // namespace tslto
