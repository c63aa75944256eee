#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tla/envs/env.hpp"
#include "tla/td3.hpp"
#include "tla/trace.hpp"

namespace tla {

/// Layered-controller settings. The slow layer acts every n base steps; the
/// fast layer acts every base step (closed loop) or is gated off (open loop).
struct TlaConfig {
  enum class Variant { kClosedLoop, kOpenLoop };

  Variant variant = Variant::kClosedLoop;
  int n = 4;                      // timestep ratio, t_slow = n * t_fast
  double threshold = 0.0;         // evaluation-time fast-action gate
  double fast_penalty = 0.1;      // lambda, weight of the fast-magnitude penalty
  bool penalty_enabled = true;    // P
  bool augment_enabled = true;    // PA: append the slow action to fast inputs
  bool per_dimension_threshold = false;
  bool window_discount = true;    // open loop: bootstrap with gamma^n per window

  void validate() const {
    check(n >= 1, "TlaConfig: n must be >= 1");
    check(threshold >= 0.0, "TlaConfig: threshold must be >= 0");
    check(fast_penalty >= 0.0, "TlaConfig: fast penalty must be >= 0");
  }
};

/// Decomposition of one executed action.
struct TlaAction {
  std::vector<double> slow;
  std::vector<double> fast;       // raw fast output (zero vector when gated)
  int gate = 1;                   // open loop only
  std::vector<double> combined;   // what the environment executed
  bool fast_suppressed = false;   // threshold outcome (closed loop)
};

/// C(a_s, a_f) = clip(a_s + a_f, a_min, a_max), elementwise.
std::vector<double> combine(std::span<const double> slow, std::span<const double> fast,
                            std::span<const double> low, std::span<const double> high);

/// Evaluation-time gate: the fast action is kept if its influence on the
/// combined action, |C(a_s, a_f) - a_s|, reaches `threshold` in at least one
/// dimension; otherwise it is zeroed. With per_dimension, each dimension is
/// kept or zeroed on its own.
std::vector<double> threshold_fast(std::span<const double> slow,
                                   std::span<const double> fast,
                                   std::span<const double> low,
                                   std::span<const double> high, double threshold,
                                   bool per_dimension = false);

/// r - lambda * mean_i |fast_i|: discourages fast interventions.
double fast_reward_shaping(double env_reward, std::span<const double> fast, double lambda);

/// Open-loop gate penalty: negative rewards double and positive rewards
/// halve when the fast controller acts (g = 0); g = 1 leaves them unchanged.
double gate_reward_shaping(double reward, int gate);

/// Reads the gated actor head (action_dim bounded values + gate probability).
/// Greedy: g = 1 iff p >= 0.5 (ties open-loop). Explore: g ~ Bernoulli(p).
struct GateDecision {
  std::vector<double> slow_action;
  double gate_prob = 0.0;
  int gate = 1;
};
GateDecision gate_decision(std::span<const double> actor_head, ActionMode mode, Rng& rng);

/// Closed-loop layered rollout/training. The frozen slow agent recomputes
/// its action from the live state every n base steps; the fast agent acts
/// residually at every base step and trains on penalty-shaped rewards. The
/// evaluation threshold is never applied while training.
struct TlaTrainResult {
  LearningCurve curve;
};

/// Trains a fast residual agent on top of a frozen slow agent trained at
/// n * base_dt. `env` and `eval_env` are two instances of the base-rate task.
TlaTrainResult train_tla_c(Env& env, Env& eval_env, Td3Agent& slow_agent,
                           Td3Agent& fast_agent, const TlaConfig& config,
                           const TrainOptions& opt);

/// One fast-activation log row: a state where the fast action survived (or
/// was zeroed by) the threshold during greedy evaluation.
struct ActivationLogRow {
  std::uint64_t t = 0;
  std::vector<double> state;
  std::vector<double> slow_action;
  std::vector<double> fast_action;
  bool suppressed = false;
};

struct TlaEvalResult {
  double return_mean = 0.0;
  double return_std = 0.0;
  std::vector<RolloutTrace> traces;            // one per episode
  std::vector<ActivationLogRow> activation_log;  // closed loop only
  double fast_active_fraction = 0.0;           // share of steps fast survived
  double gate_open_fraction = 0.0;             // open loop: share of g=1 windows
};

/// Greedy closed-loop evaluation with threshold gating; logs every step's
/// threshold outcome and counts forward passes for the decision metric.
TlaEvalResult eval_tla_c(Env& env, Td3Agent& slow_agent, Td3Agent& fast_agent,
                         const TlaConfig& config, double threshold, int episodes,
                         std::uint64_t seed);

/// Trains a gated slow agent (action head + gate) on top of a frozen fast
/// agent trained at the base rate. One slow decision covers n base steps:
/// gate 1 holds the slow action open-loop (no fast forward passes); gate 0
/// defers every base step to the fast agent. Window rewards are summed after
/// the gate penalty.
TlaTrainResult train_tla_o(Env& env, Env& eval_env, Td3Agent& fast_agent,
                           Td3Agent& slow_agent, const TlaConfig& config,
                           const TrainOptions& opt);

/// Greedy open-loop evaluation; decision counting per window outcome.
TlaEvalResult eval_tla_o(Env& env, Td3Agent& slow_agent, Td3Agent& fast_agent,
                         const TlaConfig& config, int episodes, std::uint64_t seed,
                         int force_gate = -1);

/// Fast-agent observation: state, optionally followed by the slow action.
std::vector<double> fast_observation(std::span<const double> state,
                                     std::span<const double> slow_action,
                                     bool augment_enabled);

}  // namespace tla
