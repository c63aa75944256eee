#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tla/tensor.hpp"

namespace tla {

/// Static description of a task: dimensions, action box, physics period and
/// episode cap.
struct EnvSpec {
  std::string id;
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::vector<double> action_low;
  std::vector<double> action_high;
  double base_dt = 0.0;        // seconds per physics step
  int max_episode_steps = 0;

  std::vector<double> action_half_range() const {
    std::vector<double> h(action_dim);
    for (std::size_t i = 0; i < action_dim; ++i)
      h[i] = 0.5 * (action_high[i] - action_low[i]);
    return h;
  }
};

/// One environment transition. `terminated` marks failure or goal states,
/// `truncated` marks the time limit; the two are reported separately because
/// only termination stops TD bootstrapping.
struct StepResult {
  std::vector<double> next_state;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;

  bool done() const { return terminated || truncated; }
};

/// Stateful, single-owner environment. (seed, action sequence) fully
/// determines a trajectory, bit-exact across runs.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
};

/// Environments by string id: "pendulum", "mountaincar", "cartpole".
std::unique_ptr<Env> make_env(const std::string& id);

inline void check_action(const Env& env, std::span<const double> action) {
  check(action.size() == env.spec().action_dim, "step: action width mismatch");
  for (double a : action)
    check(std::isfinite(a), "step: non-finite action");
}

}  // namespace tla
