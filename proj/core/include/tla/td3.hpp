#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tla/adam.hpp"
#include "tla/envs/env.hpp"
#include "tla/mlp.hpp"
#include "tla/replay.hpp"
#include "tla/rng.hpp"
#include "tla/trace.hpp"

namespace tla {

enum class ActionMode { kExplore, kGreedy };

struct Td3Config {
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;           // environment-facing action width
  std::vector<double> action_low;       // per executed-action dimension
  std::vector<double> action_high;
  bool gated_head = false;              // append a logistic gate output

  std::size_t hidden1 = 400;
  std::size_t hidden2 = 300;
  double learning_rate = 3e-4;
  double discount = 0.99;
  double tau = 0.005;
  double policy_noise = 0.2;            // target smoothing sigma, x half-range
  double noise_clip = 0.5;              // smoothing clip c, x half-range
  int policy_delay = 2;
  double exploration_noise = 0.1;       // sigma, x half-range
  std::size_t warmup_steps = 1000;
  std::size_t batch_size = 256;
  std::size_t buffer_capacity = 1'000'000;

  /// Action width the networks see: +1 when the gate head is present.
  std::size_t head_dim() const { return action_dim + (gated_head ? 1 : 0); }
  /// Bounds over the head: gate coordinate lives in [0, 1].
  std::vector<double> head_low() const;
  std::vector<double> head_high() const;

  void validate() const;
};

/// Twin-delayed deterministic policy-gradient learner. One agent owns its
/// six networks, optimizer states, replay memory and RNG streams; nothing is
/// shared between runs.
class Td3Agent {
 public:
  Td3Agent(const Td3Config& config, std::uint64_t seed);

  /// Greedy: deterministic bounded policy output. Explore: uniform over the
  /// action box for the first warmup_steps recorded environment steps, then
  /// policy plus N(0, sigma * half_range) clipped to bounds.
  std::vector<double> select_action(std::span<const double> state, ActionMode mode);

  /// Stores a transition and advances the warmup counter.
  void record(std::span<const double> state, std::span<const double> action,
              double reward, std::span<const double> next_state, double mask);

  /// One critic update on a sampled batch; actor and targets update every
  /// policy_delay-th call. The usual once-per-environment-step entry point.
  void update();

  /// One Adam step on each critic toward the shared clipped double-Q target.
  /// The batch is retained for the next actor update.
  std::pair<double, double> critic_update(const Batch& batch);

  /// One Adam step on the actor ascending Q1(s, pi(s)), then soft updates of
  /// all three targets. Uses the batch of the last critic_update.
  double actor_update();
  /// Same update on explicitly provided states.
  double actor_update(const Batch& batch);

  /// Target y = r + mask * discount * min(Q1', Q2')(s', a~') with smoothed,
  /// clipped target actions. Exposed for the oracle tests.
  std::vector<double> compute_td_targets(const Batch& batch);
  /// a~' = clip(pi'(s') + clip(eps, -c h, c h), low, high); exposed for the
  /// smoothing-clip property test.
  Tensor sample_smoothed_target_actions(const Tensor& next_states);
  /// Loss and actor parameter gradients exactly as actor_update computes
  /// them, without stepping; used by the finite-difference oracle.
  std::pair<double, std::vector<double>> actor_loss_and_grads(const Tensor& states);

  const Td3Config& config() const { return config_; }
  Mlp& actor() { return actor_; }
  Mlp& critic1() { return critic1_; }
  Mlp& critic2() { return critic2_; }
  Mlp& actor_target() { return actor_target_; }
  Mlp& critic1_target() { return critic1_target_; }
  Mlp& critic2_target() { return critic2_target_; }
  ReplayBuffer& buffer() { return buffer_; }
  AdamState& actor_opt() { return opt_actor_; }

  std::uint64_t env_steps() const { return env_steps_; }
  std::uint64_t critic_updates() const { return critic_updates_; }
  std::uint64_t actor_updates() const { return actor_updates_; }

  /// Control period this agent was trained at, in base steps (1 = base
  /// rate). Recorded by the trainers and checked when agents are layered.
  int action_repeat() const { return action_repeat_; }
  void set_action_repeat(int n) { action_repeat_ = n; }

  void save(std::ostream& out) const;
  static Td3Agent load(std::istream& in);
  void save_file(const std::string& path) const;
  static Td3Agent load_file(const std::string& path);

 private:
  Tensor concat_state_action(const Tensor& states, const Tensor& actions) const;

  Td3Config config_;
  Mlp actor_, actor_target_, critic1_, critic2_, critic1_target_, critic2_target_;
  AdamState opt_actor_, opt_critic1_, opt_critic2_;
  ReplayBuffer buffer_;
  Rng rng_noise_, rng_sample_, rng_warmup_;
  std::uint64_t env_steps_ = 0;
  std::uint64_t critic_updates_ = 0;
  std::uint64_t actor_updates_ = 0;
  int action_repeat_ = 1;
  std::optional<Batch> last_batch_;
};

/// Point on a learning curve: mean/std of greedy evaluation returns.
struct EvalPoint {
  std::uint64_t step = 0;
  double mean = 0.0;
  double stddev = 0.0;
};
using LearningCurve = std::vector<EvalPoint>;

struct TrainOptions {
  std::uint64_t total_steps = 30'000;
  std::uint64_t eval_every = 1'000;
  int eval_episodes = 10;
  std::uint64_t seed = 0;  // run seed; env episodes and eval derive from it
};

/// Deterministic greedy policy evaluation: mean/std of undiscounted returns
/// over fixed-seed episodes. Episode seeds depend on (seed, eval point,
/// episode) only, so different algorithms see matched initial states.
EvalPoint evaluate_policy(Env& env,
                          const std::function<std::vector<double>(std::span<const double>)>& policy,
                          int episodes, std::uint64_t seed, std::uint64_t eval_index,
                          std::uint64_t step);

struct FlatEvalResult {
  double return_mean = 0.0;
  double return_std = 0.0;
  std::vector<RolloutTrace> traces;
};

/// Greedy evaluation of a single flat agent with full traces (one forward
/// pass per base step).
FlatEvalResult evaluate_agent_traces(Env& env, Td3Agent& agent, int episodes,
                                     std::uint64_t seed, std::uint64_t eval_index = 0);

/// Standard training loop: act, store, one update per step after warmup,
/// greedy evaluation every eval_every steps (including step 0 and the end).
/// `eval_env` must be a second instance of the same stack as `env`.
LearningCurve train_td3(Env& env, Env& eval_env, Td3Agent& agent, const TrainOptions& opt);

}  // namespace tla
