#include "tla/td3.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "tla/checkpoint.hpp"

namespace tla {

namespace {

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  check(static_cast<bool>(in), "agent checkpoint: truncated stream");
  return v;
}
void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  check(static_cast<bool>(in), "agent checkpoint: truncated stream");
  return v;
}

}  // namespace

std::vector<double> Td3Config::head_low() const {
  std::vector<double> lo = action_low;
  if (gated_head) lo.push_back(0.0);
  return lo;
}

std::vector<double> Td3Config::head_high() const {
  std::vector<double> hi = action_high;
  if (gated_head) hi.push_back(1.0);
  return hi;
}

void Td3Config::validate() const {
  check(state_dim > 0 && action_dim > 0, "Td3Config: zero state or action dim");
  check(action_low.size() == action_dim && action_high.size() == action_dim,
        "Td3Config: action bound widths must match action_dim");
  for (std::size_t i = 0; i < action_dim; ++i)
    check(action_low[i] < action_high[i], "Td3Config: action_low must be < action_high");
  check(discount >= 0.0 && discount <= 1.0, "Td3Config: discount outside [0, 1]");
  check(noise_clip > 0.0, "Td3Config: noise_clip must be positive");
  check(policy_delay >= 1, "Td3Config: policy_delay must be >= 1");
  check(batch_size > 0 && buffer_capacity > 0, "Td3Config: zero batch or capacity");
}

namespace {

Mlp make_actor(const Td3Config& c) {
  std::vector<Activation> acts(c.head_dim(), Activation::kTanh);
  std::vector<double> scale(c.head_dim());
  for (std::size_t i = 0; i < c.action_dim; ++i)
    scale[i] = 0.5 * (c.action_high[i] - c.action_low[i]);
  if (c.gated_head) {
    acts[c.action_dim] = Activation::kLogistic;
    scale[c.action_dim] = 1.0;
  }
  return Mlp({c.state_dim, c.hidden1, c.hidden2, c.head_dim()}, acts, scale);
}

Mlp make_critic(const Td3Config& c) {
  return Mlp({c.state_dim + c.head_dim(), c.hidden1, c.hidden2, 1},
             Activation::kIdentity);
}

}  // namespace

Td3Agent::Td3Agent(const Td3Config& config, std::uint64_t seed)
    : config_(config),
      actor_(make_actor(config)),
      actor_target_(make_actor(config)),
      critic1_(make_critic(config)),
      critic2_(make_critic(config)),
      critic1_target_(make_critic(config)),
      critic2_target_(make_critic(config)),
      buffer_(config.buffer_capacity, config.state_dim, config.head_dim()),
      rng_noise_(derive_seed(seed, "action_noise")),
      rng_sample_(derive_seed(seed, "batch_sampling")),
      rng_warmup_(derive_seed(seed, "warmup_actions")) {
  config_.validate();
  Rng init_rng(derive_seed(seed, "net_init"));
  Rng actor_rng = init_rng.stream("actor");
  Rng c1_rng = init_rng.stream("critic1");
  Rng c2_rng = init_rng.stream("critic2");
  actor_.init(actor_rng);
  critic1_.init(c1_rng);
  critic2_.init(c2_rng);
  actor_target_ = actor_;
  critic1_target_ = critic1_;
  critic2_target_ = critic2_;
  opt_actor_ = AdamState(actor_, config_.learning_rate);
  opt_critic1_ = AdamState(critic1_, config_.learning_rate);
  opt_critic2_ = AdamState(critic2_, config_.learning_rate);
}

std::vector<double> Td3Agent::select_action(std::span<const double> state,
                                            ActionMode mode) {
  check(state.size() == config_.state_dim, "select_action: state width mismatch");
  const auto lo = config_.head_low();
  const auto hi = config_.head_high();

  if (mode == ActionMode::kExplore && env_steps_ < config_.warmup_steps) {
    std::vector<double> a(config_.head_dim());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng_warmup_.uniform(lo[i], hi[i]);
    return a;
  }

  Tensor input = Tensor::zeros({1, config_.state_dim});
  std::copy(state.begin(), state.end(), input.data.begin());
  Tensor out = actor_.forward(input);
  std::vector<double> a(out.data.begin(), out.data.end());

  if (mode == ActionMode::kExplore) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double h = 0.5 * (hi[i] - lo[i]);
      a[i] = clip(a[i] + rng_noise_.normal(0.0, config_.exploration_noise * h),
                  lo[i], hi[i]);
    }
  }
  return a;
}

void Td3Agent::record(std::span<const double> state, std::span<const double> action,
                      double reward, std::span<const double> next_state, double mask) {
  buffer_.add(state, action, reward, next_state, mask);
  ++env_steps_;
}

void Td3Agent::update() {
  check(buffer_.size() > 0, "update: replay buffer is empty");
  const Batch batch = buffer_.sample(config_.batch_size, rng_sample_);
  critic_update(batch);
  if (critic_updates_ % static_cast<std::uint64_t>(config_.policy_delay) == 0)
    actor_update();
}

Tensor Td3Agent::concat_state_action(const Tensor& states, const Tensor& actions) const {
  const std::size_t b = states.shape[0];
  const std::size_t sd = states.shape[1];
  const std::size_t ad = actions.shape[1];
  Tensor sa = Tensor::zeros({b, sd + ad});
  for (std::size_t r = 0; r < b; ++r) {
    std::copy_n(states.data.begin() + r * sd, sd, sa.data.begin() + r * (sd + ad));
    std::copy_n(actions.data.begin() + r * ad, ad,
                sa.data.begin() + r * (sd + ad) + sd);
  }
  return sa;
}

Tensor Td3Agent::sample_smoothed_target_actions(const Tensor& next_states) {
  const auto lo = config_.head_low();
  const auto hi = config_.head_high();
  Tensor next_actions = actor_target_.forward(next_states);
  const std::size_t b = next_actions.shape[0];
  const std::size_t ad = next_actions.shape[1];
  for (std::size_t r = 0; r < b; ++r) {
    for (std::size_t c = 0; c < ad; ++c) {
      const double h = 0.5 * (hi[c] - lo[c]);
      const double eps = clip(rng_noise_.normal(0.0, config_.policy_noise * h),
                              -config_.noise_clip * h, config_.noise_clip * h);
      double& a = next_actions.data[r * ad + c];
      a = clip(a + eps, lo[c], hi[c]);
    }
  }
  return next_actions;
}

std::vector<double> Td3Agent::compute_td_targets(const Batch& batch) {
  const std::size_t b = batch.size();
  Tensor next_actions = sample_smoothed_target_actions(batch.next_states);
  Tensor next_sa = concat_state_action(batch.next_states, next_actions);
  Tensor q1 = critic1_target_.forward(next_sa);
  Tensor q2 = critic2_target_.forward(next_sa);
  std::vector<double> y(b);
  for (std::size_t r = 0; r < b; ++r) {
    const double q_min = std::min(q1.data[r], q2.data[r]);
    y[r] = batch.rewards[r] + batch.masks[r] * config_.discount * q_min;
  }
  return y;
}

std::pair<double, double> Td3Agent::critic_update(const Batch& batch) {
  check(batch.size() > 0, "critic_update: empty batch");
  const std::size_t b = batch.size();
  const std::vector<double> y = compute_td_targets(batch);
  const Tensor sa = concat_state_action(batch.states, batch.actions);

  double losses[2];
  Mlp* critics[2] = {&critic1_, &critic2_};
  AdamState* opts[2] = {&opt_critic1_, &opt_critic2_};
  for (int i = 0; i < 2; ++i) {
    Tensor q = critics[i]->forward(sa);
    Tensor upstream = Tensor::zeros({b, 1});
    double loss = 0.0;
    for (std::size_t r = 0; r < b; ++r) {
      const double err = q.data[r] - y[r];
      loss += err * err;
      upstream.data[r] = 2.0 * err / static_cast<double>(b);
    }
    losses[i] = loss / static_cast<double>(b);
    critics[i]->backward(upstream);
    adam_step(*critics[i], *opts[i]);
  }
  ++critic_updates_;
  last_batch_ = batch;
  return {losses[0], losses[1]};
}

std::pair<double, std::vector<double>> Td3Agent::actor_loss_and_grads(const Tensor& states) {
  const std::size_t b = states.shape[0];
  Tensor actions = actor_.forward(states);
  Tensor sa = concat_state_action(states, actions);
  Tensor q = critic1_.forward(sa);
  const double loss = -std::accumulate(q.data.begin(), q.data.end(), 0.0) /
                      static_cast<double>(b);

  Tensor upstream = Tensor::full({b, 1}, -1.0 / static_cast<double>(b));
  Tensor dsa = critic1_.backward(upstream, /*input_grad_only=*/true);
  // Gradient w.r.t. the action slice of the critic input.
  const std::size_t sd = config_.state_dim;
  const std::size_t ad = config_.head_dim();
  Tensor da = Tensor::zeros({b, ad});
  for (std::size_t r = 0; r < b; ++r)
    std::copy_n(dsa.data.begin() + r * (sd + ad) + sd, ad, da.data.begin() + r * ad);
  actor_.backward(da);

  std::vector<double> grads;
  grads.reserve(actor_.num_params());
  actor_.visit_params([&](const std::string&, Tensor& p) {
    grads.insert(grads.end(), p.grad.begin(), p.grad.end());
  });
  return {loss, std::move(grads)};
}

double Td3Agent::actor_update() {
  check(last_batch_.has_value(), "actor_update: no critic batch available");
  return actor_update(*last_batch_);
}

double Td3Agent::actor_update(const Batch& batch) {
  auto [loss, grads] = actor_loss_and_grads(batch.states);
  (void)grads;  // already deposited in the actor's grad slots
  adam_step(actor_, opt_actor_);
  ++actor_updates_;
  soft_update(actor_target_, actor_, config_.tau);
  soft_update(critic1_target_, critic1_, config_.tau);
  soft_update(critic2_target_, critic2_, config_.tau);
  return loss;
}

void Td3Agent::save(std::ostream& out) const {
  out.write("TLAAGT01", 8);
  write_u64(out, config_.state_dim);
  write_u64(out, config_.action_dim);
  write_u64(out, config_.gated_head ? 1 : 0);
  for (std::size_t i = 0; i < config_.action_dim; ++i) {
    write_f64(out, config_.action_low[i]);
    write_f64(out, config_.action_high[i]);
  }
  write_u64(out, config_.hidden1);
  write_u64(out, config_.hidden2);
  write_f64(out, config_.learning_rate);
  write_f64(out, config_.discount);
  write_f64(out, config_.tau);
  write_f64(out, config_.policy_noise);
  write_f64(out, config_.noise_clip);
  write_u64(out, static_cast<std::uint64_t>(config_.policy_delay));
  write_f64(out, config_.exploration_noise);
  write_u64(out, config_.warmup_steps);
  write_u64(out, config_.batch_size);
  write_u64(out, config_.buffer_capacity);
  write_u64(out, static_cast<std::uint64_t>(action_repeat_));
  write_u64(out, env_steps_);
  write_u64(out, critic_updates_);
  write_u64(out, actor_updates_);
  const Mlp* nets[6] = {&actor_, &actor_target_, &critic1_, &critic2_,
                        &critic1_target_, &critic2_target_};
  for (const Mlp* n : nets) save_mlp(out, *n);
  save_adam(out, opt_actor_);
  save_adam(out, opt_critic1_);
  save_adam(out, opt_critic2_);
}

Td3Agent Td3Agent::load(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  check(static_cast<bool>(in) && std::string(magic, 8) == "TLAAGT01",
        "agent checkpoint: bad magic");
  Td3Config c;
  c.state_dim = read_u64(in);
  c.action_dim = read_u64(in);
  c.gated_head = read_u64(in) != 0;
  c.action_low.resize(c.action_dim);
  c.action_high.resize(c.action_dim);
  for (std::size_t i = 0; i < c.action_dim; ++i) {
    c.action_low[i] = read_f64(in);
    c.action_high[i] = read_f64(in);
  }
  c.hidden1 = read_u64(in);
  c.hidden2 = read_u64(in);
  c.learning_rate = read_f64(in);
  c.discount = read_f64(in);
  c.tau = read_f64(in);
  c.policy_noise = read_f64(in);
  c.noise_clip = read_f64(in);
  c.policy_delay = static_cast<int>(read_u64(in));
  c.exploration_noise = read_f64(in);
  c.warmup_steps = read_u64(in);
  c.batch_size = read_u64(in);
  c.buffer_capacity = read_u64(in);

  Td3Agent agent(c, /*seed=*/0);
  agent.action_repeat_ = static_cast<int>(read_u64(in));
  agent.env_steps_ = read_u64(in);
  agent.critic_updates_ = read_u64(in);
  agent.actor_updates_ = read_u64(in);
  agent.actor_ = load_mlp(in);
  agent.actor_target_ = load_mlp(in);
  agent.critic1_ = load_mlp(in);
  agent.critic2_ = load_mlp(in);
  agent.critic1_target_ = load_mlp(in);
  agent.critic2_target_ = load_mlp(in);
  agent.opt_actor_ = load_adam(in);
  agent.opt_critic1_ = load_adam(in);
  agent.opt_critic2_ = load_adam(in);
  return agent;
}

void Td3Agent::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  check(static_cast<bool>(out), "agent checkpoint: cannot open " + path + " for writing");
  save(out);
  check(static_cast<bool>(out), "agent checkpoint: write failed for " + path);
}

Td3Agent Td3Agent::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check(static_cast<bool>(in), "agent checkpoint: cannot open " + path);
  return load(in);
}

EvalPoint evaluate_policy(Env& env,
                          const std::function<std::vector<double>(std::span<const double>)>& policy,
                          int episodes, std::uint64_t seed, std::uint64_t eval_index,
                          std::uint64_t step) {
  std::vector<double> returns(episodes);
  for (int ep = 0; ep < episodes; ++ep) {
    const std::uint64_t ep_seed =
        derive_seed(seed, "eval_episode", eval_index * 1024 + static_cast<std::uint64_t>(ep));
    std::vector<double> state = env.reset(ep_seed);
    double ret = 0.0;
    while (true) {
      const std::vector<double> action = policy(state);
      StepResult r = env.step(action);
      ret += r.reward;
      state = std::move(r.next_state);
      if (r.done()) break;
    }
    returns[ep] = ret;
  }
  EvalPoint p;
  p.step = step;
  p.mean = std::accumulate(returns.begin(), returns.end(), 0.0) /
           static_cast<double>(episodes);
  double var = 0.0;
  for (double r : returns) var += (r - p.mean) * (r - p.mean);
  p.stddev = std::sqrt(var / static_cast<double>(episodes));
  return p;
}

FlatEvalResult evaluate_agent_traces(Env& env, Td3Agent& agent, int episodes,
                                     std::uint64_t seed, std::uint64_t eval_index) {
  FlatEvalResult out;
  std::vector<double> returns(episodes);
  for (int ep = 0; ep < episodes; ++ep) {
    const std::uint64_t ep_seed = derive_seed(
        seed, "eval_episode", eval_index * 1024 + static_cast<std::uint64_t>(ep));
    RolloutTrace trace;
    std::vector<double> state = env.reset(ep_seed);
    while (true) {
      const std::vector<double> action = agent.select_action(state, ActionMode::kGreedy);
      StepResult r = env.step(action);
      trace.states.push_back(state);
      trace.executed.push_back(action);
      trace.rewards.push_back(r.reward);
      trace.slow_ran.push_back(false);
      trace.fast_ran.push_back(true);
      trace.ret += r.reward;
      state = std::move(r.next_state);
      if (r.done()) {
        trace.terminated = r.terminated;
        trace.truncated = r.truncated;
        break;
      }
    }
    returns[ep] = trace.ret;
    out.traces.push_back(std::move(trace));
  }
  out.return_mean = std::accumulate(returns.begin(), returns.end(), 0.0) /
                    static_cast<double>(episodes);
  double var = 0.0;
  for (double r : returns) var += (r - out.return_mean) * (r - out.return_mean);
  out.return_std = std::sqrt(var / static_cast<double>(episodes));
  return out;
}

LearningCurve train_td3(Env& env, Env& eval_env, Td3Agent& agent, const TrainOptions& opt) {
  check(env.spec().state_dim == agent.config().state_dim,
        "train: environment and agent dims differ");
  LearningCurve curve;
  Rng episode_rng(derive_seed(opt.seed, "env_episodes"));

  auto greedy = [&agent](std::span<const double> s) {
    return agent.select_action(s, ActionMode::kGreedy);
  };
  auto eval_at = [&](std::uint64_t step) {
    curve.push_back(evaluate_policy(eval_env, greedy, opt.eval_episodes, opt.seed,
                                    step / std::max<std::uint64_t>(opt.eval_every, 1), step));
  };

  eval_at(0);
  std::vector<double> state = env.reset(episode_rng.next_u64());
  for (std::uint64_t step = 1; step <= opt.total_steps; ++step) {
    const std::vector<double> action = agent.select_action(state, ActionMode::kExplore);
    StepResult r = env.step(action);
    const double mask = r.terminated ? 0.0 : 1.0;
    agent.record(state, action, r.reward, r.next_state, mask);
    if (agent.env_steps() > agent.config().warmup_steps) agent.update();
    state = r.done() ? env.reset(episode_rng.next_u64()) : std::move(r.next_state);
    if (step % opt.eval_every == 0 || step == opt.total_steps) eval_at(step);
  }
  return curve;
}

}  // namespace tla
