#include "tslto/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tslto {

namespace {

// Component label per member entry of the mode-1 unfolding (4-neighborhood),
// -1 for non-members. Returns the component count.
Index label_components(const ObservationMask& mask, std::vector<Index>& labels) {
  const Index rows = mask.dims()[0];
  const Index cols = mask.dims()[1] * mask.dims()[2];
  labels.assign(static_cast<std::size_t>(mask.size()), -1);
  std::vector<Index> stack;
  Index next = 0;
  for (Index start = 0; start < mask.size(); ++start) {
    if (!mask[start] || labels[static_cast<std::size_t>(start)] >= 0) continue;
    labels[static_cast<std::size_t>(start)] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const Index cur = stack.back();
      stack.pop_back();
      const Index r = cur % rows;
      const Index c = cur / rows;
      const Index nbrs[4] = {r > 0 ? cur - 1 : -1, r + 1 < rows ? cur + 1 : -1,
                             c > 0 ? cur - rows : -1, c + 1 < cols ? cur + rows : -1};
      for (Index nb : nbrs) {
        if (nb >= 0 && mask[nb] && labels[static_cast<std::size_t>(nb)] < 0) {
          labels[static_cast<std::size_t>(nb)] = next;
          stack.push_back(nb);
        }
      }
    }
    ++next;
  }
  return next;
}

DetectionMetrics finish(Index tp, Index fp, Index fn, Index truth_hit, Index truth_total) {
  DetectionMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  m.recall = truth_total > 0 ? static_cast<double>(truth_hit) / static_cast<double>(truth_total) : 1.0;
  const double sum = m.precision + m.recall;
  m.f1 = sum > 0.0 ? 2.0 * m.precision * m.recall / sum : 0.0;
  return m;
}

}  // namespace

EvalScope parse_scope(std::string_view name) {
  if (name == "missing") return EvalScope::kMissing;
  if (name == "all") return EvalScope::kAll;
  if (name == "non-anomalous" || name == "non_anomalous") return EvalScope::kNonAnomalous;
  throw std::invalid_argument("unknown scope '" + std::string(name) +
                              "' (expected missing, all or non-anomalous)");
}

std::string_view to_string(EvalScope scope) {
  switch (scope) {
    case EvalScope::kMissing: return "missing";
    case EvalScope::kAll: return "all";
    case EvalScope::kNonAnomalous: return "non-anomalous";
  }
  return "?";
}

DetectionMode parse_detection_mode(std::string_view name) {
  if (name == "entry") return DetectionMode::kEntry;
  if (name == "block" || name == "block-overlap") return DetectionMode::kBlockOverlap;
  throw std::invalid_argument("unknown detection mode '" + std::string(name) +
                              "' (expected entry or block-overlap)");
}

std::string_view to_string(DetectionMode mode) {
  return mode == DetectionMode::kEntry ? "entry" : "block-overlap";
}

ImputationMetrics imputation_metrics(const Tensor3& truth, const Tensor3& estimate,
                                     EvalScope scope, const ObservationMask& omega,
                                     const ObservationMask* anomaly_truth) {
  require_same_dims(truth.dims(), estimate.dims(), "imputation_metrics");
  if (scope == EvalScope::kMissing) require_same_dims(truth.dims(), omega.dims(), "imputation_metrics");
  if (scope == EvalScope::kNonAnomalous) {
    if (anomaly_truth == nullptr) {
      throw std::invalid_argument("non-anomalous scope needs the anomaly ground truth");
    }
    require_same_dims(truth.dims(), anomaly_truth->dims(), "imputation_metrics");
  }

  ImputationMetrics m;
  double sq = 0.0;
  double abs = 0.0;
  double pct = 0.0;
  Index pct_n = 0;
  for (Index i = 0; i < truth.size(); ++i) {
    if (scope == EvalScope::kMissing && omega[i]) continue;
    if (scope == EvalScope::kNonAnomalous && (*anomaly_truth)[i]) continue;
    const double err = truth[i] - estimate[i];
    sq += err * err;
    abs += std::abs(err);
    ++m.count;
    if (std::abs(truth[i]) < 1e-12) {
      ++m.mape_skipped;
    } else {
      pct += std::abs(err / truth[i]);
      ++pct_n;
    }
  }
  if (m.count == 0) throw std::invalid_argument("imputation_metrics: the scope selects no entries");
  const auto n = static_cast<double>(m.count);
  m.rmse = std::sqrt(sq / n);
  m.mae = abs / n;
  if (pct_n > 0) m.mape = 100.0 * pct / static_cast<double>(pct_n);
  return m;
}

ObservationMask detected_support(const Tensor3& anomaly, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("detection threshold must be >= 0");
  ObservationMask mask(anomaly.dims());
  for (Index i = 0; i < anomaly.size(); ++i) mask.set(i, std::abs(anomaly[i]) > threshold);
  return mask;
}

DetectionMetrics detection_metrics(const ObservationMask& truth, const Tensor3& anomaly,
                                   const DetectionRule& rule) {
  require_same_dims(truth.dims(), anomaly.dims(), "detection_metrics");
  const ObservationMask detected = detected_support(anomaly, rule.threshold);

  if (rule.mode == DetectionMode::kEntry) {
    Index tp = 0, fp = 0, fn = 0;
    for (Index i = 0; i < truth.size(); ++i) {
      const bool d = detected[i];
      const bool t = truth[i];
      tp += (d && t) ? 1 : 0;
      fp += (d && !t) ? 1 : 0;
      fn += (!d && t) ? 1 : 0;
    }
    return finish(tp, fp, fn, tp, tp + fn);
  }

  std::vector<Index> det_labels;
  std::vector<Index> truth_labels;
  const Index n_det = label_components(detected, det_labels);
  const Index n_truth = label_components(truth, truth_labels);
  std::vector<char> det_hit(static_cast<std::size_t>(n_det), 0);
  std::vector<char> truth_hit(static_cast<std::size_t>(n_truth), 0);
  for (Index i = 0; i < truth.size(); ++i) {
    const Index dl = det_labels[static_cast<std::size_t>(i)];
    const Index tl = truth_labels[static_cast<std::size_t>(i)];
    if (dl >= 0 && tl >= 0) {
      det_hit[static_cast<std::size_t>(dl)] = 1;
      truth_hit[static_cast<std::size_t>(tl)] = 1;
    }
  }
  Index tp = 0;
  for (char h : det_hit) tp += h;
  Index touched = 0;
  for (char h : truth_hit) touched += h;
  return finish(tp, n_det - tp, n_truth - touched, touched, n_truth);
}

}  // namespace tslto
