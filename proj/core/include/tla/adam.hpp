#pragma once

#include <cstdint>
#include <vector>

#include "tla/mlp.hpp"

namespace tla {

/// Adam with bias correction, tracking one first/second moment entry per
/// network parameter. beta/epsilon defaults are the canonical ones; the
/// 3e-4 learning rate is the agents' default.
struct AdamState {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step_count = 0;
  std::vector<double> first_moment;   // aligned with visit_params order
  std::vector<double> second_moment;

  AdamState() = default;
  explicit AdamState(const Mlp& net, double lr = 3e-4)
      : learning_rate(lr),
        first_moment(net.num_params(), 0.0),
        second_moment(net.num_params(), 0.0) {
    check(lr > 0.0, "AdamState: learning_rate must be positive");
  }
};

/// One Adam update over every parameter of `net` from its grad slots.
/// Throws naming the offending parameter if a gradient is non-finite.
void adam_step(Mlp& net, AdamState& state);

}  // namespace tla
