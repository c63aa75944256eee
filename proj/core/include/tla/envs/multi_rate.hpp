#pragma once

#include "tla/envs/env.hpp"

namespace tla {

/// Presents an environment at a control period of n base steps: one step
/// applies the same action n times (stopping early on termination or
/// truncation) and reports the sum of the base-step rewards actually taken.
class MultiRateStepper final : public Env {
 public:
  MultiRateStepper(Env& inner, int repeat) : inner_(inner), repeat_(repeat) {
    check(repeat >= 1, "MultiRateStepper: repeat must be >= 1");
    spec_ = inner.spec();
    spec_.base_dt *= repeat;
    spec_.max_episode_steps =
        (inner.spec().max_episode_steps + repeat - 1) / repeat;
  }

  const EnvSpec& spec() const override { return spec_; }
  int repeat() const { return repeat_; }
  Env& inner() { return inner_; }

  std::vector<double> reset(std::uint64_t seed) override { return inner_.reset(seed); }

  StepResult step(std::span<const double> action) override {
    StepResult out;
    for (int k = 0; k < repeat_; ++k) {
      StepResult r = inner_.step(action);
      out.reward += r.reward;
      out.next_state = std::move(r.next_state);
      out.terminated = r.terminated;
      out.truncated = r.truncated;
      if (out.terminated || out.truncated) break;
    }
    return out;
  }

 private:
  Env& inner_;
  int repeat_;
  EnvSpec spec_;
};

}  // namespace tla
