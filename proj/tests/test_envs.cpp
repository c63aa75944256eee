#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tla/envs/env.hpp"
#include "tla/envs/multi_rate.hpp"
#include "tla/rng.hpp"

using namespace tla;

TEST_CASE("reset: same seed gives the same initial state, always") {
  for (const char* id : {"pendulum", "mountaincar", "cartpole"}) {
    auto env = make_env(id);
    const std::vector<double> a = env->reset(12345);
    env->step(std::vector<double>{0.0});
    const std::vector<double> b = env->reset(12345);
    CHECK(a == b);
    const std::vector<double> c = env->reset(54321);
    CHECK(a != c);
  }
}

TEST_CASE("reset: pendulum observation lies on the cylinder") {
  auto env = make_env("pendulum");
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::vector<double> obs = env->reset(s);
    REQUIRE(obs.size() == 3);
    CHECK(obs[0] * obs[0] + obs[1] * obs[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(obs[2]) <= 1.0);
  }
}

TEST_CASE("reset: mountain car starts in [-0.6,-0.4] at rest") {
  auto env = make_env("mountaincar");
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::vector<double> obs = env->reset(s);
    REQUIRE(obs.size() == 2);
    CHECK(obs[0] >= -0.6);
    CHECK(obs[0] <= -0.4);
    CHECK(obs[1] == 0.0);
  }
}

TEST_CASE("reset: cart-pole starts inside the +-0.01 band") {
  auto env = make_env("cartpole");
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::vector<double> obs = env->reset(s);
    REQUIRE(obs.size() == 4);
    for (double v : obs) CHECK(std::abs(v) <= 0.01);
  }
}

TEST_CASE("pendulum: upright at rest with zero torque earns zero reward") {
  oracles::PendulumRef ref{0.0, 0.0};
  ref.step(0.0);
  CHECK(ref.last_reward == 0.0);
}

TEST_CASE("pendulum: trajectory and rewards match the reference dynamics") {
  auto env = make_env("pendulum");
  const std::vector<double> obs = env->reset(7);
  oracles::PendulumRef ref{std::atan2(obs[1], obs[0]), obs[2]};
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const double u = rng.uniform(-2.0, 2.0);
    StepResult r = env->step(std::vector<double>{u});
    ref.step(u);
    CHECK(r.reward == doctest::Approx(ref.last_reward).epsilon(1e-10));
    CHECK(r.next_state[0] == doctest::Approx(std::cos(ref.theta)).epsilon(1e-10));
    CHECK(r.next_state[2] == doctest::Approx(ref.theta_dot).epsilon(1e-10));
  }
}

TEST_CASE("pendulum: rewards are never positive and episodes truncate at 200") {
  auto env = make_env("pendulum");
  env->reset(11);
  Rng rng(4);
  int steps = 0;
  while (true) {
    StepResult r = env->step(std::vector<double>{rng.uniform(-2, 2)});
    ++steps;
    CHECK(r.reward <= 0.0);
    CHECK_FALSE(r.terminated);
    if (r.done()) {
      CHECK(r.truncated);
      break;
    }
  }
  CHECK(steps == 200);
}

TEST_CASE("pendulum: zero-torque energy drifts only by integrator error") {
  auto env = make_env("pendulum");
  const std::vector<double> obs = env->reset(21);
  oracles::PendulumRef ref{std::atan2(obs[1], obs[0]), obs[2]};
  const double e0 = ref.energy();
  double max_drift = 0.0;
  for (int t = 0; t < 200; ++t) {
    StepResult r = env->step(std::vector<double>{0.0});
    ref.theta = std::atan2(r.next_state[1], r.next_state[0]);
    ref.theta_dot = r.next_state[2];
    max_drift = std::max(max_drift, std::abs(ref.energy() - e0));
    if (r.done()) break;
  }
  // Semi-implicit Euler keeps the oscillation bounded; no secular growth.
  CHECK(max_drift < 1.0);
}

TEST_CASE("mountain car: trajectory matches the reference dynamics") {
  auto env = make_env("mountaincar");
  const std::vector<double> obs = env->reset(3);
  oracles::MountainCarRef ref{obs[0]};
  Rng rng(9);
  for (int t = 0; t < 500; ++t) {
    const double u = rng.uniform(-1, 1);
    StepResult r = env->step(std::vector<double>{u});
    ref.step(u);
    CHECK(r.next_state[0] == doctest::Approx(ref.position).epsilon(1e-12));
    CHECK(r.next_state[1] == doctest::Approx(ref.velocity).epsilon(1e-12));
    CHECK(r.reward == doctest::Approx(ref.last_reward).epsilon(1e-12));
    CHECK(r.terminated == ref.done);
    if (r.done()) break;
  }
}

TEST_CASE("mountain car: reaching the goal terminates with the +100 bonus") {
  auto env = make_env("mountaincar");
  std::vector<double> obs = env->reset(5);
  bool reached = false;
  for (int t = 0; t < 999; ++t) {
    // Resonant bang-bang: push with the motion.
    const double u = obs[1] >= 0.0 ? 1.0 : -1.0;
    StepResult r = env->step(std::vector<double>{u});
    obs = r.next_state;
    if (r.terminated) {
      CHECK(r.next_state[0] >= 0.45);
      CHECK(r.reward == doctest::Approx(100.0 - 0.1).epsilon(1e-12));
      CHECK_FALSE(r.truncated);
      reached = true;
      break;
    }
    CHECK(r.reward < 0.0);
  }
  CHECK(reached);
}

TEST_CASE("cart-pole: matches the reference dynamics and pays survival reward") {
  auto env = make_env("cartpole");
  const std::vector<double> obs = env->reset(8);
  oracles::CartPoleRef ref{obs[0], obs[1], obs[2], obs[3]};
  Rng rng(10);
  for (int t = 0; t < 1000; ++t) {
    const double f = rng.uniform(-3, 3);
    StepResult r = env->step(std::vector<double>{f});
    ref.step(f);
    CHECK(r.next_state[0] == doctest::Approx(ref.x).epsilon(1e-12));
    CHECK(r.next_state[2] == doctest::Approx(ref.theta).epsilon(1e-12));
    CHECK(r.terminated == ref.done);
    CHECK((r.reward == 0.0 || r.reward == 1.0));
    if (!r.terminated) CHECK(r.reward == 1.0);
    if (r.done()) break;
  }
}

TEST_CASE("cart-pole: a stabilizing feedback survives to the 1000-step cap") {
  auto env = make_env("cartpole");
  std::vector<double> obs = env->reset(4);
  int steps = 0;
  double ret = 0.0;
  while (true) {
    const double f = std::clamp(
        20.0 * obs[2] + 4.0 * obs[3] + 0.9 * obs[1] + 0.4 * obs[0], -3.0, 3.0);
    StepResult r = env->step(std::vector<double>{f});
    obs = r.next_state;
    ret += r.reward;
    ++steps;
    if (r.done()) {
      CHECK(r.truncated);
      CHECK_FALSE(r.terminated);
      break;
    }
  }
  CHECK(steps == 1000);
  CHECK(ret == 1000.0);
}

TEST_CASE("step: non-finite action is a contract violation") {
  auto env = make_env("pendulum");
  env->reset(0);
  CHECK_THROWS_AS(env->step(std::vector<double>{std::nan("")}), ContractError);
}

TEST_CASE("determinism: (seed, action sequence) fixes the trajectory bit-exactly") {
  for (const char* id : {"pendulum", "mountaincar", "cartpole"}) {
    auto env1 = make_env(id);
    auto env2 = make_env(id);
    env1->reset(77);
    env2->reset(77);
    Rng rng1(13), rng2(13);
    for (int t = 0; t < 100; ++t) {
      StepResult a = env1->step(std::vector<double>{rng1.uniform(-1, 1)});
      StepResult b = env2->step(std::vector<double>{rng2.uniform(-1, 1)});
      CHECK(a.next_state == b.next_state);
      CHECK(a.reward == b.reward);
      if (a.done() || b.done()) break;
    }
  }
}

TEST_CASE("multi_step: n=1 is exactly step") {
  auto e1 = make_env("pendulum");
  auto e2 = make_env("pendulum");
  MultiRateStepper mrs(*e1, 1);
  mrs.reset(6);
  e2->reset(6);
  for (int t = 0; t < 50; ++t) {
    StepResult a = mrs.step(std::vector<double>{0.7});
    StepResult b = e2->step(std::vector<double>{0.7});
    CHECK(a.next_state == b.next_state);
    CHECK(a.reward == b.reward);
  }
}

TEST_CASE("multi_step: n=4 equals four explicit steps with the action held") {
  auto e1 = make_env("pendulum");
  auto e2 = make_env("pendulum");
  MultiRateStepper mrs(*e1, 4);
  mrs.reset(16);
  e2->reset(16);
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const double u = rng.uniform(-2, 2);
    StepResult a = mrs.step(std::vector<double>{u});
    double reward_sum = 0.0;
    StepResult b;
    for (int i = 0; i < 4; ++i) {
      b = e2->step(std::vector<double>{u});
      reward_sum += b.reward;
    }
    CHECK(a.next_state == b.next_state);  // exact state equality
    CHECK(a.reward == doctest::Approx(reward_sum).epsilon(1e-15));
  }
}

TEST_CASE("multi_step: stops early on termination and reports the partial sum") {
  auto inner = make_env("mountaincar");
  MultiRateStepper mrs(*inner, 4);
  std::vector<double> obs = mrs.reset(5);
  bool terminated = false;
  int windows = 0;
  while (windows < 250 && !terminated) {
    const double u = obs[1] >= 0.0 ? 1.0 : -1.0;
    StepResult r = mrs.step(std::vector<double>{u});
    obs = r.next_state;
    terminated = r.terminated;
    ++windows;
    if (terminated) {
      CHECK(r.next_state[0] >= 0.45);
      CHECK(r.reward > 90.0);  // the goal bonus minus a few action costs
    }
  }
  CHECK(terminated);
}

TEST_CASE("multi_step: slow spec reports the scaled control period") {
  auto inner = make_env("cartpole");
  MultiRateStepper mrs(*inner, 4);
  CHECK(mrs.spec().base_dt == doctest::Approx(0.08));
  CHECK(mrs.spec().max_episode_steps == 250);
  CHECK(mrs.spec().state_dim == inner->spec().state_dim);
}

TEST_CASE("truncation and termination are reported separately") {
  auto env = make_env("cartpole");
  env->reset(99);
  // Constant max force topples the pole quickly: terminated, not truncated.
  StepResult r;
  for (int t = 0; t < 1000; ++t) {
    r = env->step(std::vector<double>{3.0});
    if (r.done()) break;
  }
  CHECK(r.terminated);
  CHECK_FALSE(r.truncated);
}
