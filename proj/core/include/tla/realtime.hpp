#pragma once

#include <cstdint>
#include <vector>

#include "tla/envs/env.hpp"
#include "tla/td3.hpp"
#include "tla/tla.hpp"

namespace tla {

/// One-decision action delay as an environment wrapper. Observations carry
/// the chosen-but-not-yet-applied action, step applies the previously
/// pending action and enqueues the new one, so agents train on the delayed
/// problem with no agent-side changes. The initial pending action is zero.
class DelayedEnv final : public Env {
 public:
  explicit DelayedEnv(Env& inner) : inner_(inner) {
    spec_ = inner.spec();
    spec_.id = inner.spec().id + "_delayed";
    spec_.state_dim += spec_.action_dim;
  }

  const EnvSpec& spec() const override { return spec_; }
  Env& inner() { return inner_; }

  std::vector<double> reset(std::uint64_t seed) override {
    std::vector<double> s = inner_.reset(seed);
    pending_.assign(spec_.action_dim, 0.0);
    return observation(s);
  }

  StepResult step(std::span<const double> action) override {
    check_action(*this, action);
    StepResult r = inner_.step(pending_);
    pending_.assign(action.begin(), action.end());
    r.next_state = observation(r.next_state);
    return r;
  }

  const std::vector<double>& pending() const { return pending_; }

 private:
  std::vector<double> observation(const std::vector<double>& s) const {
    std::vector<double> obs = s;
    obs.insert(obs.end(), pending_.begin(), pending_.end());
    return obs;
  }

  Env& inner_;
  EnvSpec spec_;
  std::vector<double> pending_;
};

/// Chosen vs applied actions per base step, for the real-time trace dump.
struct RealtimeLogRow {
  std::uint64_t t = 0;
  std::vector<double> state;
  std::vector<double> chosen;
  std::vector<double> applied;
  double reward = 0.0;
};

struct RealtimeEvalResult {
  double return_mean = 0.0;
  double return_std = 0.0;
  std::vector<RolloutTrace> traces;       // executed = applied actions
  std::vector<RealtimeLogRow> log;        // first episode only
};

/// Stage 2 of the real-time pipeline: trains the fast layer on top of a
/// frozen slow agent that was pre-trained on
/// DelayedEnv(MultiRateStepper(env, n)). Every layer runs under its own
/// one-decision delay: slow choices take effect one window later, fast
/// choices one base step later. Fast observations carry the pending combined
/// action plus, when augmentation is on, the slow action it will combine
/// with.
TlaTrainResult train_tla_realtime_fast(Env& env, Env& eval_env, Td3Agent& slow_agent,
                                       Td3Agent& fast_agent, const TlaConfig& config,
                                       const TrainOptions& opt);

/// Greedy delayed layered evaluation with threshold gating of the fast
/// action at execution time.
RealtimeEvalResult eval_tla_realtime(Env& env, Td3Agent& slow_agent,
                                     Td3Agent& fast_agent, const TlaConfig& config,
                                     double threshold, int episodes, std::uint64_t seed,
                                     std::uint64_t eval_index = 0);

/// Width of the realtime fast observation for agent construction.
std::size_t realtime_fast_obs_dim(const EnvSpec& spec, bool augment_enabled);

}  // namespace tla
