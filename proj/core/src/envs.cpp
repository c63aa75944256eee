#include "tla/envs/env.hpp"

#include <algorithm>
#include <cmath>

#include "tla/envs/constants.hpp"
#include "tla/rng.hpp"

namespace tla {

namespace {

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double angle_normalize(double theta) {
  const double two_pi = 2.0 * M_PI;
  double wrapped = std::fmod(theta + M_PI, two_pi);
  if (wrapped < 0.0) wrapped += two_pi;
  return wrapped - M_PI;
}

class PendulumEnv final : public Env {
 public:
  PendulumEnv() {
    namespace c = env_constants::pendulum;
    spec_.id = "pendulum";
    spec_.state_dim = 3;  // (cos theta, sin theta, theta_dot)
    spec_.action_dim = 1;
    spec_.action_low = {-c::kMaxTorque};
    spec_.action_high = {c::kMaxTorque};
    spec_.base_dt = c::kDt;
    spec_.max_episode_steps = c::kMaxEpisodeSteps;
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(std::uint64_t seed) override {
    Rng rng(seed);
    namespace c = env_constants::pendulum;
    theta_ = rng.uniform(-c::kInitAngleRange, c::kInitAngleRange);
    theta_dot_ = rng.uniform(-c::kInitSpeedRange, c::kInitSpeedRange);
    steps_ = 0;
    return observation();
  }

  StepResult step(std::span<const double> action) override {
    check_action(*this, action);
    namespace c = env_constants::pendulum;
    const double u = clip(action[0], -c::kMaxTorque, c::kMaxTorque);
    const double th = angle_normalize(theta_);
    const double cost = th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;

    const double acc = 3.0 * c::kGravity / (2.0 * c::kLength) * std::sin(theta_) +
                       3.0 / (c::kMass * c::kLength * c::kLength) * u;
    theta_dot_ = clip(theta_dot_ + acc * c::kDt, -c::kMaxSpeed, c::kMaxSpeed);
    theta_ += theta_dot_ * c::kDt;

    StepResult r;
    r.reward = -cost;
    r.next_state = observation();
    r.truncated = ++steps_ >= spec_.max_episode_steps;
    return r;
  }

 private:
  std::vector<double> observation() const {
    return {std::cos(theta_), std::sin(theta_), theta_dot_};
  }

  EnvSpec spec_;
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
  int steps_ = 0;
};

class MountainCarEnv final : public Env {
 public:
  MountainCarEnv() {
    namespace c = env_constants::mountain_car;
    spec_.id = "mountaincar";
    spec_.state_dim = 2;  // (position, velocity)
    spec_.action_dim = 1;
    spec_.action_low = {-c::kMaxAction};
    spec_.action_high = {c::kMaxAction};
    spec_.base_dt = 1.0;  // the published dynamics are per-step, not per-second
    spec_.max_episode_steps = c::kMaxEpisodeSteps;
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(std::uint64_t seed) override {
    Rng rng(seed);
    namespace c = env_constants::mountain_car;
    position_ = rng.uniform(c::kInitPositionLow, c::kInitPositionHigh);
    velocity_ = 0.0;
    steps_ = 0;
    return {position_, velocity_};
  }

  StepResult step(std::span<const double> action) override {
    check_action(*this, action);
    namespace c = env_constants::mountain_car;
    const double u = clip(action[0], -c::kMaxAction, c::kMaxAction);

    velocity_ += u * c::kPower - c::kGravityTerm * std::cos(3.0 * position_);
    velocity_ = clip(velocity_, -c::kMaxSpeed, c::kMaxSpeed);
    position_ += velocity_;
    position_ = clip(position_, c::kMinPosition, c::kMaxPosition);
    if (position_ <= c::kMinPosition && velocity_ < 0.0) velocity_ = 0.0;

    StepResult r;
    r.terminated = position_ >= c::kGoalPosition && velocity_ >= c::kGoalVelocity;
    r.reward = -c::kActionCost * u * u + (r.terminated ? c::kGoalBonus : 0.0);
    r.next_state = {position_, velocity_};
    if (!r.terminated) r.truncated = ++steps_ >= spec_.max_episode_steps;
    return r;
  }

 private:
  EnvSpec spec_;
  double position_ = 0.0;
  double velocity_ = 0.0;
  int steps_ = 0;
};

class CartPoleEnv final : public Env {
 public:
  CartPoleEnv() {
    namespace c = env_constants::cart_pole;
    spec_.id = "cartpole";
    spec_.state_dim = 4;  // (x, x_dot, theta, theta_dot)
    spec_.action_dim = 1;
    spec_.action_low = {-c::kMaxForce};
    spec_.action_high = {c::kMaxForce};
    spec_.base_dt = c::kDt;
    spec_.max_episode_steps = c::kMaxEpisodeSteps;
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(std::uint64_t seed) override {
    Rng rng(seed);
    namespace c = env_constants::cart_pole;
    x_ = rng.uniform(-c::kInitBand, c::kInitBand);
    x_dot_ = rng.uniform(-c::kInitBand, c::kInitBand);
    theta_ = rng.uniform(-c::kInitBand, c::kInitBand);
    theta_dot_ = rng.uniform(-c::kInitBand, c::kInitBand);
    steps_ = 0;
    return {x_, x_dot_, theta_, theta_dot_};
  }

  StepResult step(std::span<const double> action) override {
    check_action(*this, action);
    namespace c = env_constants::cart_pole;
    const double force = clip(action[0], -c::kMaxForce, c::kMaxForce);
    const double total_mass = c::kMassCart + c::kMassPole;
    const double pole_ml = c::kMassPole * c::kHalfPoleLength;

    const double cos_t = std::cos(theta_);
    const double sin_t = std::sin(theta_);
    const double temp = (force + pole_ml * theta_dot_ * theta_dot_ * sin_t) / total_mass;
    const double theta_acc =
        (c::kGravity * sin_t - cos_t * temp) /
        (c::kHalfPoleLength * (4.0 / 3.0 - c::kMassPole * cos_t * cos_t / total_mass));
    const double x_acc = temp - pole_ml * theta_acc * cos_t / total_mass;

    // Semi-implicit Euler: velocities first, then positions.
    x_dot_ += x_acc * c::kDt;
    x_ += x_dot_ * c::kDt;
    theta_dot_ += theta_acc * c::kDt;
    theta_ += theta_dot_ * c::kDt;

    StepResult r;
    r.terminated = std::abs(theta_) > c::kAngleLimit || std::abs(x_) > c::kPositionLimit;
    r.reward = r.terminated ? 0.0 : 1.0;
    r.next_state = {x_, x_dot_, theta_, theta_dot_};
    if (!r.terminated) r.truncated = ++steps_ >= spec_.max_episode_steps;
    return r;
  }

 private:
  EnvSpec spec_;
  double x_ = 0.0, x_dot_ = 0.0, theta_ = 0.0, theta_dot_ = 0.0;
  int steps_ = 0;
};

}  // namespace

std::unique_ptr<Env> make_env(const std::string& id) {
  if (id == "pendulum") return std::make_unique<PendulumEnv>();
  if (id == "mountaincar") return std::make_unique<MountainCarEnv>();
  if (id == "cartpole") return std::make_unique<CartPoleEnv>();
  throw ContractError("make_env: unknown environment id '" + id + "'");
}

}  // namespace tla
