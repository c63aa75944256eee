#include "tla/tla.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tla {

namespace {

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

void mean_std(const std::vector<double>& xs, double& mean, double& stddev) {
  mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  stddev = std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace

std::vector<double> combine(std::span<const double> slow, std::span<const double> fast,
                            std::span<const double> low, std::span<const double> high) {
  check(slow.size() == fast.size() && slow.size() == low.size() &&
            slow.size() == high.size(),
        "combine: dimension mismatch");
  std::vector<double> out(slow.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    check(std::isfinite(slow[i]) && std::isfinite(fast[i]), "combine: non-finite input");
    out[i] = clip(slow[i] + fast[i], low[i], high[i]);
  }
  return out;
}

std::vector<double> threshold_fast(std::span<const double> slow,
                                   std::span<const double> fast,
                                   std::span<const double> low,
                                   std::span<const double> high, double threshold,
                                   bool per_dimension) {
  check(threshold >= 0.0, "threshold_fast: threshold must be >= 0");
  const std::vector<double> combined = combine(slow, fast, low, high);
  std::vector<double> influence(fast.size());
  for (std::size_t i = 0; i < fast.size(); ++i)
    influence[i] = std::abs(combined[i] - slow[i]);

  std::vector<double> out(fast.begin(), fast.end());
  if (per_dimension) {
    for (std::size_t i = 0; i < out.size(); ++i)
      if (influence[i] < threshold) out[i] = 0.0;
  } else {
    // Zero the whole vector only when the influence falls short of the
    // threshold in every dimension.
    bool keep = false;
    for (double d : influence) keep = keep || d >= threshold;
    if (!keep) out.assign(out.size(), 0.0);
  }
  return out;
}

double fast_reward_shaping(double env_reward, std::span<const double> fast, double lambda) {
  check(lambda >= 0.0, "fast_reward_shaping: lambda must be >= 0");
  double mag = 0.0;
  for (double f : fast) mag += std::abs(f);
  mag /= static_cast<double>(fast.size());
  return env_reward - lambda * mag;
}

double gate_reward_shaping(double reward, int gate) {
  if (gate == 1) return reward;
  return reward <= 0.0 ? 2.0 * reward : 0.5 * reward;
}

GateDecision gate_decision(std::span<const double> actor_head, ActionMode mode, Rng& rng) {
  check(actor_head.size() >= 2, "gate_decision: head must carry action and gate");
  GateDecision d;
  d.slow_action.assign(actor_head.begin(), actor_head.end() - 1);
  d.gate_prob = actor_head.back();
  if (mode == ActionMode::kGreedy) {
    d.gate = d.gate_prob >= 0.5 ? 1 : 0;
  } else {
    d.gate = rng.bernoulli(d.gate_prob) ? 1 : 0;
  }
  return d;
}

std::vector<double> fast_observation(std::span<const double> state,
                                     std::span<const double> slow_action,
                                     bool augment_enabled) {
  std::vector<double> obs(state.begin(), state.end());
  if (augment_enabled) obs.insert(obs.end(), slow_action.begin(), slow_action.end());
  return obs;
}

namespace {

struct ClosedLoopEpisode {
  RolloutTrace trace;
  std::vector<ActivationLogRow> log;
  std::size_t active_steps = 0;  // fast survived the threshold
};

ClosedLoopEpisode closed_loop_episode(Env& env, Td3Agent& slow, Td3Agent& fast,
                                      const TlaConfig& cfg, double threshold,
                                      std::uint64_t ep_seed, bool collect_log) {
  const EnvSpec& spec = env.spec();
  ClosedLoopEpisode ep;
  std::vector<double> state = env.reset(ep_seed);
  std::vector<double> a_slow;
  std::uint64_t t = 0;
  while (true) {
    const bool window_start = t % static_cast<std::uint64_t>(cfg.n) == 0;
    if (window_start) a_slow = slow.select_action(state, ActionMode::kGreedy);
    const std::vector<double> obs_f =
        fast_observation(state, a_slow, cfg.augment_enabled);
    const std::vector<double> a_fast = fast.select_action(obs_f, ActionMode::kGreedy);
    const std::vector<double> eff = threshold_fast(
        a_slow, a_fast, spec.action_low, spec.action_high, threshold,
        cfg.per_dimension_threshold);
    const bool suppressed =
        std::all_of(eff.begin(), eff.end(), [](double v) { return v == 0.0; }) &&
        !std::all_of(a_fast.begin(), a_fast.end(), [](double v) { return v == 0.0; });
    if (!suppressed) ++ep.active_steps;
    const std::vector<double> executed =
        combine(a_slow, eff, spec.action_low, spec.action_high);

    if (collect_log) {
      ActivationLogRow row;
      row.t = t;
      row.state = state;
      row.slow_action = a_slow;
      row.fast_action = a_fast;
      row.suppressed = suppressed;
      ep.log.push_back(std::move(row));
    }

    StepResult r = env.step(executed);
    ep.trace.states.push_back(state);
    ep.trace.executed.push_back(executed);
    ep.trace.rewards.push_back(r.reward);
    ep.trace.slow_ran.push_back(window_start);
    ep.trace.fast_ran.push_back(true);
    ep.trace.ret += r.reward;
    state = std::move(r.next_state);
    ++t;
    if (r.done()) {
      ep.trace.terminated = r.terminated;
      ep.trace.truncated = r.truncated;
      break;
    }
  }
  return ep;
}

}  // namespace

TlaTrainResult train_tla_c(Env& env, Env& eval_env, Td3Agent& slow_agent,
                           Td3Agent& fast_agent, const TlaConfig& config,
                           const TrainOptions& opt) {
  config.validate();
  check(config.variant == TlaConfig::Variant::kClosedLoop,
        "train_tla_c: config variant must be closed_loop");
  check(slow_agent.action_repeat() == config.n,
        "train_tla_c: slow agent was trained at repeat " +
            std::to_string(slow_agent.action_repeat()) + ", config expects n = " +
            std::to_string(config.n));
  const EnvSpec& spec = env.spec();
  const std::size_t expect_obs =
      spec.state_dim + (config.augment_enabled ? spec.action_dim : 0);
  check(fast_agent.config().state_dim == expect_obs,
        "train_tla_c: fast agent observation width mismatch");

  const double lambda = config.penalty_enabled ? config.fast_penalty : 0.0;
  Rng episode_rng(derive_seed(opt.seed, "env_episodes"));
  TlaTrainResult result;

  auto eval_at = [&](std::uint64_t step) {
    std::vector<double> rets(opt.eval_episodes);
    const std::uint64_t eval_index = step / std::max<std::uint64_t>(opt.eval_every, 1);
    for (int e = 0; e < opt.eval_episodes; ++e) {
      const std::uint64_t ep_seed = derive_seed(
          opt.seed, "eval_episode", eval_index * 1024 + static_cast<std::uint64_t>(e));
      rets[e] = closed_loop_episode(eval_env, slow_agent, fast_agent, config,
                                    config.threshold, ep_seed, false)
                    .trace.ret;
    }
    EvalPoint p;
    p.step = step;
    mean_std(rets, p.mean, p.stddev);
    result.curve.push_back(p);
  };

  eval_at(0);
  std::vector<double> state = env.reset(episode_rng.next_u64());
  std::uint64_t ep_step = 0;
  std::vector<double> a_slow = slow_agent.select_action(state, ActionMode::kGreedy);

  for (std::uint64_t step = 1; step <= opt.total_steps; ++step) {
    const std::vector<double> obs_f =
        fast_observation(state, a_slow, config.augment_enabled);
    const std::vector<double> a_fast =
        fast_agent.select_action(obs_f, ActionMode::kExplore);
    const std::vector<double> executed =
        combine(a_slow, a_fast, spec.action_low, spec.action_high);
    StepResult r = env.step(executed);

    // Slow action in force at the successor state: recomputed at window
    // boundaries, held otherwise.
    const std::uint64_t next_ep_step = ep_step + 1;
    std::vector<double> a_slow_next = a_slow;
    if (next_ep_step % static_cast<std::uint64_t>(config.n) == 0)
      a_slow_next = slow_agent.select_action(r.next_state, ActionMode::kGreedy);
    const std::vector<double> obs_f_next =
        fast_observation(r.next_state, a_slow_next, config.augment_enabled);

    const double shaped = fast_reward_shaping(r.reward, a_fast, lambda);
    const double mask = r.terminated ? 0.0 : 1.0;
    fast_agent.record(obs_f, a_fast, shaped, obs_f_next, mask);
    if (fast_agent.env_steps() > fast_agent.config().warmup_steps) fast_agent.update();

    if (r.done()) {
      state = env.reset(episode_rng.next_u64());
      ep_step = 0;
      a_slow = slow_agent.select_action(state, ActionMode::kGreedy);
    } else {
      state = std::move(r.next_state);
      ep_step = next_ep_step;
      a_slow = std::move(a_slow_next);
    }
    if (step % opt.eval_every == 0 || step == opt.total_steps) eval_at(step);
  }
  return result;
}

TlaEvalResult eval_tla_c(Env& env, Td3Agent& slow_agent, Td3Agent& fast_agent,
                         const TlaConfig& config, double threshold, int episodes,
                         std::uint64_t seed) {
  TlaEvalResult out;
  std::vector<double> rets(episodes);
  std::size_t active = 0, total_steps = 0;
  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t ep_seed =
        derive_seed(seed, "eval_episode", static_cast<std::uint64_t>(e));
    ClosedLoopEpisode ep = closed_loop_episode(env, slow_agent, fast_agent, config,
                                               threshold, ep_seed, true);
    rets[e] = ep.trace.ret;
    active += ep.active_steps;
    total_steps += ep.trace.steps();
    out.traces.push_back(std::move(ep.trace));
    out.activation_log.insert(out.activation_log.end(), ep.log.begin(), ep.log.end());
  }
  mean_std(rets, out.return_mean, out.return_std);
  out.fast_active_fraction =
      total_steps == 0 ? 0.0 : static_cast<double>(active) / static_cast<double>(total_steps);
  return out;
}

namespace {

struct OpenLoopWindow {
  double raw_reward = 0.0;     // sum of environment rewards taken
  double shaped_reward = 0.0;  // sum after the gate penalty
  std::vector<double> end_state;
  bool terminated = false;
  bool truncated = false;
  int base_steps = 0;
};

/// Executes one slow decision: gate 1 holds a_slow for n base steps, gate 0
/// lets the frozen fast agent act at every base step.
OpenLoopWindow run_window(Env& env, Td3Agent& fast_agent, std::span<const double> a_slow,
                          int gate, int n, std::vector<double> state,
                          RolloutTrace* trace) {
  OpenLoopWindow w;
  w.end_state = std::move(state);
  for (int k = 0; k < n; ++k) {
    std::vector<double> action;
    if (gate == 1) {
      action.assign(a_slow.begin(), a_slow.end());
    } else {
      action = fast_agent.select_action(w.end_state, ActionMode::kGreedy);
    }
    StepResult r = env.step(action);
    if (trace) {
      trace->states.push_back(w.end_state);
      trace->executed.push_back(action);
      trace->rewards.push_back(r.reward);
      trace->slow_ran.push_back(k == 0);
      trace->fast_ran.push_back(gate == 0);
      trace->ret += r.reward;
      if (r.done()) {
        trace->terminated = r.terminated;
        trace->truncated = r.truncated;
      }
    }
    w.raw_reward += r.reward;
    w.shaped_reward += gate_reward_shaping(r.reward, gate);
    w.end_state = std::move(r.next_state);
    w.terminated = r.terminated;
    w.truncated = r.truncated;
    ++w.base_steps;
    if (r.done()) break;
  }
  return w;
}

}  // namespace

TlaTrainResult train_tla_o(Env& env, Env& eval_env, Td3Agent& fast_agent,
                           Td3Agent& slow_agent, const TlaConfig& config,
                           const TrainOptions& opt) {
  config.validate();
  check(config.variant == TlaConfig::Variant::kOpenLoop,
        "train_tla_o: config variant must be open_loop");
  check(fast_agent.action_repeat() == 1,
        "train_tla_o: fast agent must be trained at the base rate");
  check(slow_agent.config().gated_head, "train_tla_o: slow agent needs a gate head");
  check(slow_agent.config().state_dim == env.spec().state_dim,
        "train_tla_o: slow agent state width mismatch");

  Rng episode_rng(derive_seed(opt.seed, "env_episodes"));
  Rng gate_rng(derive_seed(opt.seed, "gate_sampling"));
  TlaTrainResult result;

  auto eval_at = [&](std::uint64_t step) {
    TlaEvalResult ev = eval_tla_o(eval_env, slow_agent, fast_agent, config,
                                  opt.eval_episodes, opt.seed);
    EvalPoint p;
    p.step = step;
    p.mean = ev.return_mean;
    p.stddev = ev.return_std;
    result.curve.push_back(p);
  };

  eval_at(0);
  std::vector<double> state = env.reset(episode_rng.next_u64());
  std::uint64_t base_steps = 0;
  std::uint64_t next_eval = opt.eval_every;

  while (base_steps < opt.total_steps) {
    const std::vector<double> head = slow_agent.select_action(state, ActionMode::kExplore);
    GateDecision gd = gate_decision(head, ActionMode::kExplore, gate_rng);
    // The stored action carries the executed gate bit, so the critic sees
    // the decision that actually produced the window's reward.
    std::vector<double> stored = gd.slow_action;
    stored.push_back(static_cast<double>(gd.gate));

    OpenLoopWindow w = run_window(env, fast_agent, gd.slow_action, gd.gate, config.n,
                                  state, nullptr);
    base_steps += static_cast<std::uint64_t>(w.base_steps);
    const double mask = w.terminated ? 0.0 : 1.0;
    slow_agent.record(state, stored, w.shaped_reward, w.end_state, mask);
    if (slow_agent.env_steps() > slow_agent.config().warmup_steps) slow_agent.update();

    if (w.terminated || w.truncated) {
      state = env.reset(episode_rng.next_u64());
    } else {
      state = w.end_state;
    }
    if (base_steps >= next_eval || base_steps >= opt.total_steps) {
      eval_at(base_steps);
      while (next_eval <= base_steps) next_eval += opt.eval_every;
    }
  }
  return result;
}

TlaEvalResult eval_tla_o(Env& env, Td3Agent& slow_agent, Td3Agent& fast_agent,
                         const TlaConfig& config, int episodes, std::uint64_t seed,
                         int force_gate) {
  TlaEvalResult out;
  Rng unused_rng(0);
  std::vector<double> rets(episodes);
  std::size_t open_windows = 0, windows = 0;
  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t ep_seed =
        derive_seed(seed, "eval_episode", static_cast<std::uint64_t>(e));
    RolloutTrace trace;
    trace.open_loop = true;
    std::vector<double> state = env.reset(ep_seed);
    while (true) {
      const std::vector<double> head = slow_agent.select_action(state, ActionMode::kGreedy);
      GateDecision gd = gate_decision(head, ActionMode::kGreedy, unused_rng);
      if (force_gate >= 0) gd.gate = force_gate;
      ++windows;
      if (gd.gate == 1) ++open_windows;
      OpenLoopWindow w = run_window(env, fast_agent, gd.slow_action, gd.gate, config.n,
                                    state, &trace);
      state = w.end_state;
      if (w.terminated || w.truncated) break;
    }
    rets[e] = trace.ret;
    out.traces.push_back(std::move(trace));
  }
  mean_std(rets, out.return_mean, out.return_std);
  out.gate_open_fraction =
      windows == 0 ? 0.0 : static_cast<double>(open_windows) / static_cast<double>(windows);
  return out;
}

}  // namespace tla
