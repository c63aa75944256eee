#pragma once

namespace tla::env_constants {

// Pendulum: torque-limited rigid rod swung about one end, angle measured
// from upright. theta_dd = (3g / 2l) sin(theta) + (3 / m l^2) u, integrated
// semi-implicitly. Reward is -(theta^2 + 0.1 theta_dot^2 + 0.001 u^2) with
// theta wrapped to [-pi, pi]. No failure state; 200-step time limit.
namespace pendulum {
inline constexpr double kGravity = 10.0;
inline constexpr double kMass = 1.0;
inline constexpr double kLength = 1.0;
inline constexpr double kDt = 0.05;
inline constexpr double kMaxTorque = 2.0;
inline constexpr double kMaxSpeed = 8.0;
inline constexpr double kInitAngleRange = 3.14159265358979323846;  // theta ~ U(-pi, pi)
inline constexpr double kInitSpeedRange = 1.0;                     // theta_dot ~ U(-1, 1)
inline constexpr int kMaxEpisodeSteps = 200;
}  // namespace pendulum

// Mountain car (continuous): underpowered car in a sinusoidal valley.
// velocity += u * power - 0.0025 cos(3 x); reward is -0.1 u^2 per step and
// +100 on reaching the goal position with non-negative velocity.
namespace mountain_car {
inline constexpr double kPower = 0.0015;
inline constexpr double kGravityTerm = 0.0025;
inline constexpr double kMinPosition = -1.2;
inline constexpr double kMaxPosition = 0.6;
inline constexpr double kMaxSpeed = 0.07;
inline constexpr double kGoalPosition = 0.45;
inline constexpr double kGoalVelocity = 0.0;
inline constexpr double kInitPositionLow = -0.6;
inline constexpr double kInitPositionHigh = -0.4;
inline constexpr double kMaxAction = 1.0;
inline constexpr double kActionCost = 0.1;   // reward -= 0.1 u^2
inline constexpr double kGoalBonus = 100.0;
inline constexpr int kMaxEpisodeSteps = 999;
}  // namespace mountain_car

// Cart-pole (continuous force): pole balanced on a pushed cart, integrated
// with semi-implicit Euler. +1 per surviving step, terminates when the pole
// or cart leaves its band, 1000-step cap. The force bound is deliberately
// small so the task needs continuous regulation rather than bang-bang.
namespace cart_pole {
inline constexpr double kGravity = 9.8;
inline constexpr double kMassCart = 1.0;
inline constexpr double kMassPole = 0.1;
inline constexpr double kHalfPoleLength = 0.5;
inline constexpr double kMaxForce = 3.0;
inline constexpr double kDt = 0.02;
inline constexpr double kAngleLimit = 0.2;      // radians
inline constexpr double kPositionLimit = 2.4;   // meters
inline constexpr double kInitBand = 0.01;       // all coords ~ U(-0.01, 0.01)
inline constexpr int kMaxEpisodeSteps = 1000;
}  // namespace cart_pole

}  // namespace tla::env_constants
