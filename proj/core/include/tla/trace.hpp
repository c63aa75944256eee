#pragma once

#include <cstddef>
#include <vector>

namespace tla {

/// Per-base-step record of one evaluation episode, annotated with which
/// networks ran, enough to compute the repetition and decision metrics and
/// to dump trajectories.
struct RolloutTrace {
  std::vector<std::vector<double>> states;    // state before each base step
  std::vector<std::vector<double>> executed;  // executed action per base step
  std::vector<double> rewards;                // reward per base step
  std::vector<bool> slow_ran;                 // slow net forward pass this step
  std::vector<bool> fast_ran;                 // fast (or only) net forward pass
  bool open_loop = false;                     // gated-variant accounting
  bool terminated = false;                    // how the episode ended
  bool truncated = false;
  double ret = 0.0;                           // undiscounted return

  std::size_t steps() const { return executed.size(); }
};

}  // namespace tla
