#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tla/td3.hpp"
#include "tla/trace.hpp"

namespace tla {

/// Per-run aggregates reported by the harness.
struct RunMetrics {
  LearningCurve learning_curve;
  double final_return_mean = 0.0;
  double final_return_std = 0.0;
  double normalized_auc = 0.0;        // in [0, 1]
  double action_repetition_pct = 0.0; // in [0, 100]
  double decisions_mean = 0.0;        // per evaluation episode
};

/// Fixed per-environment return bounds used to rescale learning curves
/// before integrating. Documented here because the AUC is only comparable
/// across algorithms under one fixed normalization.
struct ReturnBounds {
  double min_return = 0.0;
  double max_return = 1.0;
};
ReturnBounds return_bounds(const std::string& env_id);

/// Trapezoidal area of the curve after rescaling returns to [0, 1] with the
/// given bounds (clamped), divided by the step span.
double normalized_auc(const LearningCurve& curve, const ReturnBounds& bounds);
double normalized_auc(const LearningCurve& curve, const std::string& env_id);

/// 100 * (#steps t>0 whose executed action is bit-equal to the previous
/// one) / (#steps - 1). Requires at least two steps.
double action_repetition(const RolloutTrace& trace);
/// Mean over episodes.
double action_repetition(const std::vector<RolloutTrace>& traces);

/// Decisions per episode. Closed-loop and flat policies decide on every base
/// step that runs a forward pass; the open-loop variant pays one decision
/// per slow pass plus one per base step the fast controller computes on.
double count_decisions(const RolloutTrace& trace);
double count_decisions(const std::vector<RolloutTrace>& traces);

}  // namespace tla
