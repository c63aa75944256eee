#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tla {

/// Everything one experiment needs: algorithm, task, seeds, budgets,
/// layered-controller settings and the underlying learner's
/// hyperparameters. Parsed from a flat key=value file with CLI overrides on
/// top.
struct ExperimentConfig {
  std::string algorithm = "td3";  // td3 | tla_c | tla_o | td3_delayed | tla_realtime
  std::string env_id = "pendulum";
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  std::uint64_t total_steps = 30'000;     // base-step budget of the trained layer
  std::uint64_t pretrain_steps = 30'000;  // base-step budget of the frozen layer
  std::uint64_t eval_every = 1'000;
  int eval_episodes = 10;

  // Layered-controller settings.
  int n = 4;
  double threshold = 0.0;
  double lambda = -1.0;  // < 0 picks the per-environment default
  bool augment = true;   // PA: slow action appended to fast observations
  bool penalty = true;   // P: fast-magnitude reward penalty
  bool realtime = false; // one-decision delay per layer
  bool per_dimension_threshold = false;
  bool window_discount = true;  // open loop bootstraps with gamma^n
  std::string fast_checkpoint;  // reuse a trained fast agent ({seed} expands)

  // Learner hyperparameters.
  double learning_rate = 3e-4;
  double discount = 0.99;
  double tau = 0.005;
  double policy_noise = 0.2;
  double noise_clip = 0.5;
  int policy_delay = 2;
  double exploration_noise = 0.1;
  std::uint64_t warmup_steps = 1'000;
  std::uint64_t pretrain_warmup_steps = 0;  // 0 = same as warmup_steps
  std::uint64_t batch_size = 256;
  std::uint64_t buffer_capacity = 1'000'000;
  std::uint64_t hidden1 = 400;
  std::uint64_t hidden2 = 300;

  std::string out_dir = "runs/experiment";
  int workers = 0;  // 0 = one per seed up to the hardware concurrency

  /// Normalizes the realtime flag into the algorithm name and validates.
  void finalize();
  /// Resolved fast-action penalty: explicit lambda or the per-env default.
  double effective_lambda() const;
  /// Serialized key=value form (the resolved-config artifact).
  std::string to_key_values() const;
};

/// Per-environment default penalty scale: 0.1 x the task's typical
/// per-step reward magnitude.
double default_lambda(const std::string& env_id);

/// Parses `key = value` lines; '#' starts a comment, blank lines ignored.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Applies one `key=value` override; throws on unknown keys or bad values.
void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value);

}  // namespace tla
