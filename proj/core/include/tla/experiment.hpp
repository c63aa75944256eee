#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tla/config.hpp"
#include "tla/metrics.hpp"
#include "tla/td3.hpp"
#include "tla/tla.hpp"

namespace tla {

/// Outcome of one seed's full pipeline (pre-training stage included when the
/// algorithm has one).
struct SeedResult {
  std::uint64_t seed = 0;
  RunMetrics metrics;               // learning_curve = final-stage curve, base steps
  LearningCurve pretrain_curve;     // empty for flat algorithms
  double fast_active_fraction = 0.0;
  double gate_open_fraction = 0.0;
};

struct ExperimentResult {
  std::vector<SeedResult> per_seed;  // ordered as config.seeds
  RunMetrics aggregate;              // curve = per-step mean across seeds
};

/// Runs every seed of the configured experiment (in parallel workers when
/// asked; aggregation is a seed-ordered reduce so parallelism never changes
/// outputs) and writes all artifacts under config.out_dir:
///   config.txt                resolved configuration
///   seed_<s>/curve.csv        step,eval_return_mean,eval_return_std
///   seed_<s>/pretrain_curve.csv   (pipelines)
///   seed_<s>/*.ckpt           agent checkpoints
///   seed_<s>/eval_trace.csv   first final-evaluation episode
///   seed_<s>/activations.csv  fast-activation log (closed loop)
///   seed_<s>/realtime_trace.csv   chosen vs applied actions (realtime)
///   aggregate_curve.csv, metrics.csv, curve.svg
ExperimentResult run_experiment(const ExperimentConfig& config);

/// One seed, artifacts under <dir>; used by run_experiment's workers.
SeedResult run_single_seed(const ExperimentConfig& config, std::uint64_t seed,
                           const std::string& dir);

struct SweepRow {
  double threshold = 0.0;
  double return_mean = 0.0;
  double return_std = 0.0;
  double activation_frequency = 0.0;  // share of base steps the fast action survived
};

/// Evaluates a trained closed-loop pair at each threshold with fixed
/// evaluation seeds. Thresholds are sorted and deduplicated, so the output
/// column is strictly increasing.
std::vector<SweepRow> threshold_sweep(Env& env, Td3Agent& slow_agent,
                                      Td3Agent& fast_agent, const TlaConfig& config,
                                      std::vector<double> thresholds, int episodes,
                                      std::uint64_t seed);

void write_sweep_artifacts(const std::vector<SweepRow>& rows, const std::string& csv_path,
                           const std::string& svg_path);

/// "a:step:b" inclusive, e.g. "0:0.05:1.0".
std::vector<double> parse_threshold_range(const std::string& text);

}  // namespace tla
