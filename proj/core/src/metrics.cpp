#include "tla/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace tla {

ReturnBounds return_bounds(const std::string& env_id) {
  if (env_id.starts_with("pendulum")) return {-1600.0, 0.0};
  if (env_id.starts_with("mountaincar")) return {-100.0, 100.0};
  if (env_id.starts_with("cartpole")) return {0.0, 1000.0};
  throw ContractError("return_bounds: no normalization bounds for '" + env_id + "'");
}

double normalized_auc(const LearningCurve& curve, const ReturnBounds& bounds) {
  check(!curve.empty(), "normalized_auc: empty curve");
  check(bounds.max_return > bounds.min_return, "normalized_auc: degenerate bounds");
  auto rescale = [&](double r) {
    const double v = (r - bounds.min_return) / (bounds.max_return - bounds.min_return);
    return std::clamp(v, 0.0, 1.0);
  };
  if (curve.size() == 1) return rescale(curve.front().mean);

  double area = 0.0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const double dx = static_cast<double>(curve[i + 1].step - curve[i].step);
    area += 0.5 * (rescale(curve[i].mean) + rescale(curve[i + 1].mean)) * dx;
  }
  const double span = static_cast<double>(curve.back().step - curve.front().step);
  check(span > 0.0, "normalized_auc: zero step span");
  return area / span;
}

double normalized_auc(const LearningCurve& curve, const std::string& env_id) {
  return normalized_auc(curve, return_bounds(env_id));
}

double action_repetition(const RolloutTrace& trace) {
  check(trace.steps() >= 2, "action_repetition: trace shorter than 2 steps");
  std::size_t repeats = 0;
  for (std::size_t t = 1; t < trace.steps(); ++t)
    if (trace.executed[t] == trace.executed[t - 1]) ++repeats;
  return 100.0 * static_cast<double>(repeats) /
         static_cast<double>(trace.steps() - 1);
}

double action_repetition(const std::vector<RolloutTrace>& traces) {
  check(!traces.empty(), "action_repetition: no traces");
  double sum = 0.0;
  for (const RolloutTrace& t : traces) sum += action_repetition(t);
  return sum / static_cast<double>(traces.size());
}

double count_decisions(const RolloutTrace& trace) {
  std::size_t n = 0;
  if (trace.open_loop) {
    for (std::size_t t = 0; t < trace.steps(); ++t) {
      if (trace.slow_ran[t]) ++n;
      if (trace.fast_ran[t]) ++n;
    }
  } else {
    for (std::size_t t = 0; t < trace.steps(); ++t)
      if (trace.slow_ran[t] || trace.fast_ran[t]) ++n;
  }
  return static_cast<double>(n);
}

double count_decisions(const std::vector<RolloutTrace>& traces) {
  check(!traces.empty(), "count_decisions: no traces");
  double sum = 0.0;
  for (const RolloutTrace& t : traces) sum += count_decisions(t);
  return sum / static_cast<double>(traces.size());
}

}  // namespace tla
