#include "tla/realtime.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace tla {

namespace {

void mean_std(const std::vector<double>& xs, double& mean, double& stddev) {
  mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  stddev = std::sqrt(var / static_cast<double>(xs.size()));
}

/// Both layers under their own one-decision delay. The slow layer re-decides
/// every n base steps from the live state; its choice becomes active one
/// window later. The fast layer's choice becomes pending and executes on the
/// following base step, combined with whichever slow action is active then.
struct LayeredDelayedRollout {
  Env& env;
  Td3Agent& slow;
  Td3Agent& fast;
  const TlaConfig& cfg;
  double threshold;  // applied to the fast action at execution time

  std::vector<double> state;
  std::vector<double> sigma_cur;   // slow action active in the current window
  std::vector<double> sigma_next;  // chosen this window, active next window
  std::vector<double> phi_pend;    // fast action chosen last base step
  std::uint64_t ep_step = 0;
  std::uint64_t ticked_step = ~0ULL;

  LayeredDelayedRollout(Env& e, Td3Agent& s, Td3Agent& f, const TlaConfig& c,
                        double thresh)
      : env(e), slow(s), fast(f), cfg(c), threshold(thresh) {}

  void begin(std::uint64_t seed) {
    state = env.reset(seed);
    const std::size_t ad = env.spec().action_dim;
    sigma_cur.assign(ad, 0.0);
    sigma_next.assign(ad, 0.0);
    phi_pend.assign(ad, 0.0);
    ep_step = 0;
    ticked_step = ~0ULL;
  }

  /// Performs the slow tick when a window opens, then returns the fast
  /// observation for this base step together with the action about to be
  /// applied. Safe to call again on the same step (the tick runs once).
  struct Obs {
    std::vector<double> fast_obs;
    std::vector<double> applied;
  };
  Obs make_obs() {
    const EnvSpec& spec = env.spec();
    if (ep_step % static_cast<std::uint64_t>(cfg.n) == 0 && ticked_step != ep_step) {
      ticked_step = ep_step;
      sigma_cur = sigma_next;
      std::vector<double> slow_obs = state;
      slow_obs.insert(slow_obs.end(), sigma_cur.begin(), sigma_cur.end());
      sigma_next = slow.select_action(slow_obs, ActionMode::kGreedy);
    }
    const std::vector<double> eff =
        threshold_fast(sigma_cur, phi_pend, spec.action_low, spec.action_high,
                       threshold, cfg.per_dimension_threshold);
    Obs o;
    o.applied = combine(sigma_cur, eff, spec.action_low, spec.action_high);
    // Slow action that will be active when the fast action chosen now
    // executes (the next base step).
    const std::vector<double>& sigma_pa =
        (ep_step + 1) % static_cast<std::uint64_t>(cfg.n) == 0 ? sigma_next : sigma_cur;
    o.fast_obs = state;
    o.fast_obs.insert(o.fast_obs.end(), o.applied.begin(), o.applied.end());
    if (cfg.augment_enabled)
      o.fast_obs.insert(o.fast_obs.end(), sigma_pa.begin(), sigma_pa.end());
    return o;
  }

  /// Executes the pending action, stores the new fast choice as pending.
  StepResult advance(const Obs& o, const std::vector<double>& phi_new) {
    StepResult r = env.step(o.applied);
    phi_pend = phi_new;
    state = r.next_state;
    ++ep_step;
    return r;
  }
};

}  // namespace

std::size_t realtime_fast_obs_dim(const EnvSpec& spec, bool augment_enabled) {
  return spec.state_dim + spec.action_dim + (augment_enabled ? spec.action_dim : 0);
}

TlaTrainResult train_tla_realtime_fast(Env& env, Env& eval_env, Td3Agent& slow_agent,
                                       Td3Agent& fast_agent, const TlaConfig& config,
                                       const TrainOptions& opt) {
  config.validate();
  check(config.variant == TlaConfig::Variant::kClosedLoop,
        "train_tla_realtime_fast: the real-time pipeline uses the closed-loop variant");
  check(slow_agent.action_repeat() == config.n,
        "train_tla_realtime_fast: slow agent control period mismatch");
  check(slow_agent.config().state_dim == env.spec().state_dim + env.spec().action_dim,
        "train_tla_realtime_fast: slow agent must be trained on the delayed task");
  check(fast_agent.config().state_dim ==
            realtime_fast_obs_dim(env.spec(), config.augment_enabled),
        "train_tla_realtime_fast: fast agent observation width mismatch");

  const double lambda = config.penalty_enabled ? config.fast_penalty : 0.0;
  Rng episode_rng(derive_seed(opt.seed, "env_episodes"));
  TlaTrainResult result;

  auto eval_at = [&](std::uint64_t step) {
    RealtimeEvalResult ev =
        eval_tla_realtime(eval_env, slow_agent, fast_agent, config, config.threshold,
                          opt.eval_episodes, opt.seed,
                          step / std::max<std::uint64_t>(opt.eval_every, 1));
    EvalPoint p;
    p.step = step;
    p.mean = ev.return_mean;
    p.stddev = ev.return_std;
    result.curve.push_back(p);
  };

  eval_at(0);
  // Training happens on delayed transitions: the reward of each stored step
  // is the one generated while the stored choice was being made.
  LayeredDelayedRollout roll(env, slow_agent, fast_agent, config, /*threshold=*/0.0);
  roll.begin(episode_rng.next_u64());

  struct Pending {
    std::vector<double> obs;
    std::vector<double> phi;
    double reward = 0.0;
    double mask = 1.0;
  };
  std::optional<Pending> prev;

  for (std::uint64_t step = 1; step <= opt.total_steps; ++step) {
    LayeredDelayedRollout::Obs o = roll.make_obs();
    if (prev) {
      fast_agent.record(prev->obs, prev->phi, prev->reward, o.fast_obs, prev->mask);
      if (fast_agent.env_steps() > fast_agent.config().warmup_steps) fast_agent.update();
    }
    const std::vector<double> phi = fast_agent.select_action(o.fast_obs, ActionMode::kExplore);
    StepResult r = roll.advance(o, phi);

    Pending p;
    p.obs = std::move(o.fast_obs);
    p.phi = phi;
    p.reward = fast_reward_shaping(r.reward, phi, lambda);
    p.mask = r.terminated ? 0.0 : 1.0;
    prev = std::move(p);

    if (r.done()) {
      // Flush against the terminal delayed observation.
      LayeredDelayedRollout::Obs term = roll.make_obs();
      fast_agent.record(prev->obs, prev->phi, prev->reward, term.fast_obs, prev->mask);
      if (fast_agent.env_steps() > fast_agent.config().warmup_steps) fast_agent.update();
      prev.reset();
      roll.begin(episode_rng.next_u64());
    }
    if (step % opt.eval_every == 0 || step == opt.total_steps) eval_at(step);
  }
  return result;
}

RealtimeEvalResult eval_tla_realtime(Env& env, Td3Agent& slow_agent,
                                     Td3Agent& fast_agent, const TlaConfig& config,
                                     double threshold, int episodes, std::uint64_t seed,
                                     std::uint64_t eval_index) {
  RealtimeEvalResult out;
  std::vector<double> rets(episodes);
  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t ep_seed = derive_seed(
        seed, "eval_episode", eval_index * 1024 + static_cast<std::uint64_t>(e));
    LayeredDelayedRollout roll(env, slow_agent, fast_agent, config, threshold);
    roll.begin(ep_seed);
    RolloutTrace trace;
    while (true) {
      const bool window_start =
          roll.ep_step % static_cast<std::uint64_t>(config.n) == 0;
      LayeredDelayedRollout::Obs o = roll.make_obs();
      const std::vector<double> phi =
          fast_agent.select_action(o.fast_obs, ActionMode::kGreedy);
      // Chosen = what this step's decision will execute next step; applied =
      // what executes now. The one-step shift is visible in the log.
      const std::vector<double>& sigma_exec =
          (roll.ep_step + 1) % static_cast<std::uint64_t>(config.n) == 0
              ? roll.sigma_next
              : roll.sigma_cur;
      const std::vector<double> chosen = combine(
          sigma_exec,
          threshold_fast(sigma_exec, phi, env.spec().action_low,
                         env.spec().action_high, threshold,
                         config.per_dimension_threshold),
          env.spec().action_low, env.spec().action_high);
      if (e == 0) {
        RealtimeLogRow row;
        row.t = roll.ep_step;
        row.state = roll.state;
        row.chosen = chosen;
        row.applied = o.applied;
        out.log.push_back(std::move(row));
      }
      trace.states.push_back(roll.state);
      StepResult r = roll.advance(o, phi);
      if (e == 0) out.log.back().reward = r.reward;
      trace.executed.push_back(o.applied);
      trace.rewards.push_back(r.reward);
      trace.slow_ran.push_back(window_start);
      trace.fast_ran.push_back(true);
      trace.ret += r.reward;
      if (r.done()) {
        trace.terminated = r.terminated;
        trace.truncated = r.truncated;
        break;
      }
    }
    rets[e] = trace.ret;
    out.traces.push_back(std::move(trace));
  }
  mean_std(rets, out.return_mean, out.return_std);
  return out;
}

}  // namespace tla
