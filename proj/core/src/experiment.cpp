#include "tla/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "tla/csv.hpp"
#include "tla/envs/multi_rate.hpp"
#include "tla/realtime.hpp"
#include "tla/svg.hpp"

namespace fs = std::filesystem;

namespace tla {

namespace {

// Final evaluations share one out-of-band eval index so matched seeds see
// matched initial states across algorithms.
constexpr std::uint64_t kFinalEvalIndex = 1'000'000;

Td3Config base_td3_config(const ExperimentConfig& c, const EnvSpec& obs_spec,
                          const EnvSpec& act_spec) {
  Td3Config tc;
  tc.state_dim = obs_spec.state_dim;
  tc.action_dim = act_spec.action_dim;
  tc.action_low = act_spec.action_low;
  tc.action_high = act_spec.action_high;
  tc.hidden1 = c.hidden1;
  tc.hidden2 = c.hidden2;
  tc.learning_rate = c.learning_rate;
  tc.discount = c.discount;
  tc.tau = c.tau;
  tc.policy_noise = c.policy_noise;
  tc.noise_clip = c.noise_clip;
  tc.policy_delay = c.policy_delay;
  tc.exploration_noise = c.exploration_noise;
  tc.warmup_steps = c.warmup_steps;
  tc.batch_size = c.batch_size;
  tc.buffer_capacity = c.buffer_capacity;
  return tc;
}

TlaConfig tla_config_of(const ExperimentConfig& c, TlaConfig::Variant variant) {
  TlaConfig t;
  t.variant = variant;
  t.n = c.n;
  t.threshold = c.threshold;
  t.fast_penalty = c.effective_lambda();
  t.penalty_enabled = c.penalty;
  t.augment_enabled = c.augment;
  t.per_dimension_threshold = c.per_dimension_threshold;
  t.window_discount = c.window_discount;
  return t;
}

void write_curve_csv(const std::string& path, const LearningCurve& curve) {
  CsvWriter w({"step", "eval_return_mean", "eval_return_std"});
  for (const EvalPoint& p : curve)
    w.add_row({static_cast<double>(p.step), p.mean, p.stddev});
  w.write_file(path);
}

void write_trajectory_csv(const std::string& path, const RolloutTrace& trace) {
  check(!trace.states.empty(), "write_trajectory_csv: empty trace");
  std::vector<std::string> header = {"t"};
  for (std::size_t i = 0; i < trace.states[0].size(); ++i)
    header.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < trace.executed[0].size(); ++i)
    header.push_back("a" + std::to_string(i));
  header.push_back("r");
  header.push_back("terminated");
  header.push_back("truncated");
  CsvWriter w(header);
  for (std::size_t t = 0; t < trace.steps(); ++t) {
    const bool last = t + 1 == trace.steps();
    std::vector<double> row = {static_cast<double>(t)};
    row.insert(row.end(), trace.states[t].begin(), trace.states[t].end());
    row.insert(row.end(), trace.executed[t].begin(), trace.executed[t].end());
    row.push_back(trace.rewards[t]);
    row.push_back(last && trace.terminated ? 1.0 : 0.0);
    row.push_back(last && trace.truncated ? 1.0 : 0.0);
    w.add_row(row);
  }
  w.write_file(path);
}

void write_activation_csv(const std::string& path,
                          const std::vector<ActivationLogRow>& log) {
  check(!log.empty(), "write_activation_csv: empty log");
  std::vector<std::string> header = {"t"};
  for (std::size_t i = 0; i < log[0].state.size(); ++i)
    header.push_back("state" + std::to_string(i));
  for (std::size_t i = 0; i < log[0].slow_action.size(); ++i)
    header.push_back("a_slow" + std::to_string(i));
  for (std::size_t i = 0; i < log[0].fast_action.size(); ++i)
    header.push_back("a_fast" + std::to_string(i));
  header.push_back("suppressed");
  CsvWriter w(header);
  for (const ActivationLogRow& r : log) {
    std::vector<double> row = {static_cast<double>(r.t)};
    row.insert(row.end(), r.state.begin(), r.state.end());
    row.insert(row.end(), r.slow_action.begin(), r.slow_action.end());
    row.insert(row.end(), r.fast_action.begin(), r.fast_action.end());
    row.push_back(r.suppressed ? 1.0 : 0.0);
    w.add_row(row);
  }
  w.write_file(path);
}

void write_realtime_csv(const std::string& path, const std::vector<RealtimeLogRow>& log) {
  check(!log.empty(), "write_realtime_csv: empty log");
  std::vector<std::string> header = {"t"};
  for (std::size_t i = 0; i < log[0].state.size(); ++i)
    header.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < log[0].chosen.size(); ++i)
    header.push_back("chosen" + std::to_string(i));
  for (std::size_t i = 0; i < log[0].applied.size(); ++i)
    header.push_back("applied" + std::to_string(i));
  header.push_back("r");
  CsvWriter w(header);
  for (const RealtimeLogRow& r : log) {
    std::vector<double> row = {static_cast<double>(r.t)};
    row.insert(row.end(), r.state.begin(), r.state.end());
    row.insert(row.end(), r.chosen.begin(), r.chosen.end());
    row.insert(row.end(), r.applied.begin(), r.applied.end());
    row.push_back(r.reward);
    w.add_row(row);
  }
  w.write_file(path);
}

LearningCurve scale_curve_steps(LearningCurve curve, std::uint64_t factor) {
  for (EvalPoint& p : curve) p.step *= factor;
  return curve;
}

std::string expand_seed(std::string pattern, std::uint64_t seed) {
  const std::string tag = "{seed}";
  const std::size_t pos = pattern.find(tag);
  if (pos != std::string::npos) pattern.replace(pos, tag.size(), std::to_string(seed));
  return pattern;
}

void fill_common_metrics(SeedResult& r, const ExperimentConfig& c,
                         const std::vector<RolloutTrace>& traces, double final_mean,
                         double final_std) {
  r.metrics.final_return_mean = final_mean;
  r.metrics.final_return_std = final_std;
  r.metrics.normalized_auc = normalized_auc(r.metrics.learning_curve, c.env_id);
  r.metrics.action_repetition_pct = action_repetition(traces);
  r.metrics.decisions_mean = count_decisions(traces);
}

SeedResult run_flat(const ExperimentConfig& c, std::uint64_t seed, const fs::path& dir) {
  auto base_train = make_env(c.env_id);
  auto base_eval = make_env(c.env_id);
  DelayedEnv delayed_train(*base_train);
  DelayedEnv delayed_eval(*base_eval);
  const bool delayed = c.algorithm == "td3_delayed";
  Env& train_env = delayed ? static_cast<Env&>(delayed_train) : *base_train;
  Env& eval_env = delayed ? static_cast<Env&>(delayed_eval) : *base_eval;

  Td3Agent agent(base_td3_config(c, train_env.spec(), base_train->spec()),
                 derive_seed(seed, "agent"));
  TrainOptions opt{c.total_steps, c.eval_every, c.eval_episodes, seed};
  SeedResult r;
  r.seed = seed;
  r.metrics.learning_curve = train_td3(train_env, eval_env, agent, opt);
  agent.save_file((dir / "agent.ckpt").string());

  FlatEvalResult fin =
      evaluate_agent_traces(eval_env, agent, c.eval_episodes, seed, kFinalEvalIndex);
  fill_common_metrics(r, c, fin.traces, fin.return_mean, fin.return_std);
  write_trajectory_csv((dir / "eval_trace.csv").string(), fin.traces.front());
  return r;
}

SeedResult run_tla_c(const ExperimentConfig& c, std::uint64_t seed, const fs::path& dir) {
  auto base_train = make_env(c.env_id);
  auto base_eval = make_env(c.env_id);

  // Stage 1: slow learner at n x base_dt.
  MultiRateStepper slow_train(*base_train, c.n);
  MultiRateStepper slow_eval(*base_eval, c.n);
  Td3Config slow_cfg = base_td3_config(c, slow_train.spec(), base_train->spec());
  if (c.pretrain_warmup_steps > 0) slow_cfg.warmup_steps = c.pretrain_warmup_steps;
  Td3Agent slow(slow_cfg, derive_seed(seed, "slow_agent"));
  slow.set_action_repeat(c.n);
  TrainOptions slow_opt{std::max<std::uint64_t>(c.pretrain_steps / c.n, 1),
                        std::max<std::uint64_t>(c.eval_every / c.n, 1),
                        c.eval_episodes, seed};
  SeedResult r;
  r.seed = seed;
  r.pretrain_curve =
      scale_curve_steps(train_td3(slow_train, slow_eval, slow, slow_opt), c.n);
  slow.save_file((dir / "slow.ckpt").string());

  // Stage 2: fast residual learner at the base rate.
  EnvSpec fast_obs_spec = base_train->spec();
  fast_obs_spec.state_dim += c.augment ? base_train->spec().action_dim : 0;
  Td3Agent fast(base_td3_config(c, fast_obs_spec, base_train->spec()),
                derive_seed(seed, "fast_agent"));
  const TlaConfig tla = tla_config_of(c, TlaConfig::Variant::kClosedLoop);
  TrainOptions fast_opt{c.total_steps, c.eval_every, c.eval_episodes, seed};
  r.metrics.learning_curve =
      train_tla_c(*base_train, *base_eval, slow, fast, tla, fast_opt).curve;
  fast.save_file((dir / "fast.ckpt").string());

  TlaEvalResult fin = eval_tla_c(*base_eval, slow, fast, tla, c.threshold,
                                 c.eval_episodes, derive_seed(seed, "final_eval"));
  fill_common_metrics(r, c, fin.traces, fin.return_mean, fin.return_std);
  r.fast_active_fraction = fin.fast_active_fraction;
  write_trajectory_csv((dir / "eval_trace.csv").string(), fin.traces.front());
  write_activation_csv((dir / "activations.csv").string(), fin.activation_log);
  return r;
}

SeedResult run_tla_o(const ExperimentConfig& c, std::uint64_t seed, const fs::path& dir) {
  auto base_train = make_env(c.env_id);
  auto base_eval = make_env(c.env_id);

  // Stage 1: the fast layer is a plain base-rate learner, or a checkpoint.
  SeedResult r;
  r.seed = seed;
  Td3Config fast_cfg = base_td3_config(c, base_train->spec(), base_train->spec());
  Td3Agent fast = [&]() {
    if (!c.fast_checkpoint.empty())
      return Td3Agent::load_file(expand_seed(c.fast_checkpoint, seed));
    Td3Agent agent(fast_cfg, derive_seed(seed, "agent"));
    TrainOptions opt{c.pretrain_steps, c.eval_every, c.eval_episodes, seed};
    r.pretrain_curve = train_td3(*base_train, *base_eval, agent, opt);
    return agent;
  }();
  check(fast.action_repeat() == 1, "tla_o: fast checkpoint not trained at base rate");
  fast.save_file((dir / "fast.ckpt").string());

  // Stage 2: gated slow learner over n-step windows.
  Td3Config slow_cfg = base_td3_config(c, base_train->spec(), base_train->spec());
  slow_cfg.gated_head = true;
  slow_cfg.discount = c.window_discount
                          ? std::pow(c.discount, static_cast<double>(c.n))
                          : c.discount;
  Td3Agent slow(slow_cfg, derive_seed(seed, "slow_agent"));
  slow.set_action_repeat(c.n);
  const TlaConfig tla = tla_config_of(c, TlaConfig::Variant::kOpenLoop);
  TrainOptions slow_opt{c.total_steps, c.eval_every, c.eval_episodes, seed};
  r.metrics.learning_curve =
      train_tla_o(*base_train, *base_eval, fast, slow, tla, slow_opt).curve;
  slow.save_file((dir / "slow.ckpt").string());

  TlaEvalResult fin = eval_tla_o(*base_eval, slow, fast, tla, c.eval_episodes,
                                 derive_seed(seed, "final_eval"));
  fill_common_metrics(r, c, fin.traces, fin.return_mean, fin.return_std);
  r.gate_open_fraction = fin.gate_open_fraction;
  write_trajectory_csv((dir / "eval_trace.csv").string(), fin.traces.front());
  return r;
}

SeedResult run_tla_realtime(const ExperimentConfig& c, std::uint64_t seed,
                            const fs::path& dir) {
  auto base_train = make_env(c.env_id);
  auto base_eval = make_env(c.env_id);

  // Stage 1: slow learner under its own one-window delay.
  MultiRateStepper mr_train(*base_train, c.n);
  MultiRateStepper mr_eval(*base_eval, c.n);
  DelayedEnv slow_train(mr_train);
  DelayedEnv slow_eval(mr_eval);
  Td3Config rt_slow_cfg = base_td3_config(c, slow_train.spec(), base_train->spec());
  if (c.pretrain_warmup_steps > 0) rt_slow_cfg.warmup_steps = c.pretrain_warmup_steps;
  Td3Agent slow(rt_slow_cfg, derive_seed(seed, "slow_agent"));
  slow.set_action_repeat(c.n);
  TrainOptions slow_opt{std::max<std::uint64_t>(c.pretrain_steps / c.n, 1),
                        std::max<std::uint64_t>(c.eval_every / c.n, 1),
                        c.eval_episodes, seed};
  SeedResult r;
  r.seed = seed;
  r.pretrain_curve =
      scale_curve_steps(train_td3(slow_train, slow_eval, slow, slow_opt), c.n);
  slow.save_file((dir / "slow.ckpt").string());

  // Stage 2: fast layer under a one-base-step delay on top of the frozen
  // slow layer.
  EnvSpec fast_obs_spec = base_train->spec();
  fast_obs_spec.state_dim = realtime_fast_obs_dim(base_train->spec(), c.augment);
  Td3Agent fast(base_td3_config(c, fast_obs_spec, base_train->spec()),
                derive_seed(seed, "fast_agent"));
  const TlaConfig tla = tla_config_of(c, TlaConfig::Variant::kClosedLoop);
  TrainOptions fast_opt{c.total_steps, c.eval_every, c.eval_episodes, seed};
  r.metrics.learning_curve =
      train_tla_realtime_fast(*base_train, *base_eval, slow, fast, tla, fast_opt).curve;
  fast.save_file((dir / "fast.ckpt").string());

  RealtimeEvalResult fin =
      eval_tla_realtime(*base_eval, slow, fast, tla, c.threshold, c.eval_episodes,
                        derive_seed(seed, "final_eval"), kFinalEvalIndex);
  fill_common_metrics(r, c, fin.traces, fin.return_mean, fin.return_std);
  write_trajectory_csv((dir / "eval_trace.csv").string(), fin.traces.front());
  write_realtime_csv((dir / "realtime_trace.csv").string(), fin.log);
  return r;
}

LearningCurve resample_curve(const LearningCurve& curve, const std::vector<double>& grid) {
  LearningCurve out;
  for (double g : grid) {
    EvalPoint p;
    p.step = static_cast<std::uint64_t>(g);
    if (g <= static_cast<double>(curve.front().step)) {
      p.mean = curve.front().mean;
      p.stddev = curve.front().stddev;
    } else if (g >= static_cast<double>(curve.back().step)) {
      p.mean = curve.back().mean;
      p.stddev = curve.back().stddev;
    } else {
      for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const double x0 = static_cast<double>(curve[i].step);
        const double x1 = static_cast<double>(curve[i + 1].step);
        if (g >= x0 && g <= x1) {
          const double w = x1 > x0 ? (g - x0) / (x1 - x0) : 0.0;
          p.mean = curve[i].mean + w * (curve[i + 1].mean - curve[i].mean);
          p.stddev = curve[i].stddev + w * (curve[i + 1].stddev - curve[i].stddev);
          break;
        }
      }
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

SeedResult run_single_seed(const ExperimentConfig& c, std::uint64_t seed,
                           const std::string& dir_str) {
  const fs::path dir(dir_str);
  fs::create_directories(dir);
  SeedResult r;
  if (c.algorithm == "td3" || c.algorithm == "td3_delayed") {
    r = run_flat(c, seed, dir);
  } else if (c.algorithm == "tla_c") {
    r = run_tla_c(c, seed, dir);
  } else if (c.algorithm == "tla_o") {
    r = run_tla_o(c, seed, dir);
  } else if (c.algorithm == "tla_realtime") {
    r = run_tla_realtime(c, seed, dir);
  } else {
    throw ContractError("run_single_seed: unknown algorithm " + c.algorithm);
  }
  write_curve_csv((dir / "curve.csv").string(), r.metrics.learning_curve);
  if (!r.pretrain_curve.empty())
    write_curve_csv((dir / "pretrain_curve.csv").string(), r.pretrain_curve);
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& config_in) {
  ExperimentConfig c = config_in;
  c.finalize();
  const fs::path out(c.out_dir);
  fs::create_directories(out);
  {
    std::ofstream f(out / "config.txt", std::ios::binary);
    check(static_cast<bool>(f), "run_experiment: cannot write config artifact");
    f << c.to_key_values();
  }

  ExperimentResult result;
  result.per_seed.resize(c.seeds.size());
  const std::size_t workers =
      c.workers > 0 ? static_cast<std::size_t>(c.workers)
                    : std::max<std::size_t>(
                          1, std::min<std::size_t>(std::thread::hardware_concurrency(),
                                                   c.seeds.size()));

  for (std::size_t begin = 0; begin < c.seeds.size(); begin += workers) {
    const std::size_t end = std::min(begin + workers, c.seeds.size());
    std::vector<std::future<SeedResult>> futs;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t seed = c.seeds[i];
      const std::string dir = (out / ("seed_" + std::to_string(seed))).string();
      futs.push_back(std::async(std::launch::async, [&c, seed, dir]() {
        return run_single_seed(c, seed, dir);
      }));
    }
    for (std::size_t i = begin; i < end; ++i)
      result.per_seed[i] = futs[i - begin].get();
  }

  // Seed-ordered reduce onto a common step grid.
  std::vector<double> grid;
  for (std::uint64_t s = 0; s <= c.total_steps; s += c.eval_every)
    grid.push_back(static_cast<double>(s));
  if (grid.back() != static_cast<double>(c.total_steps))
    grid.push_back(static_cast<double>(c.total_steps));

  std::vector<LearningCurve> resampled;
  for (const SeedResult& r : result.per_seed)
    resampled.push_back(resample_curve(r.metrics.learning_curve, grid));
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    EvalPoint p;
    p.step = static_cast<std::uint64_t>(grid[gi]);
    double sum = 0.0;
    for (const LearningCurve& curve : resampled) sum += curve[gi].mean;
    p.mean = sum / static_cast<double>(resampled.size());
    double var = 0.0;
    for (const LearningCurve& curve : resampled)
      var += (curve[gi].mean - p.mean) * (curve[gi].mean - p.mean);
    p.stddev = std::sqrt(var / static_cast<double>(resampled.size()));
    result.aggregate.learning_curve.push_back(p);
  }

  auto mean_of = [&](auto field) {
    double s = 0.0;
    for (const SeedResult& r : result.per_seed) s += field(r);
    return s / static_cast<double>(result.per_seed.size());
  };
  result.aggregate.final_return_mean =
      mean_of([](const SeedResult& r) { return r.metrics.final_return_mean; });
  result.aggregate.final_return_std =
      mean_of([](const SeedResult& r) { return r.metrics.final_return_std; });
  result.aggregate.normalized_auc =
      mean_of([](const SeedResult& r) { return r.metrics.normalized_auc; });
  result.aggregate.action_repetition_pct =
      mean_of([](const SeedResult& r) { return r.metrics.action_repetition_pct; });
  result.aggregate.decisions_mean =
      mean_of([](const SeedResult& r) { return r.metrics.decisions_mean; });

  write_curve_csv((out / "aggregate_curve.csv").string(),
                  result.aggregate.learning_curve);

  CsvWriter metrics({"seed", "final_return_mean", "final_return_std", "normalized_auc",
                     "action_repetition_pct", "decisions_mean", "fast_active_fraction",
                     "gate_open_fraction"});
  for (const SeedResult& r : result.per_seed) {
    metrics.add_row_mixed({std::to_string(r.seed),
                           CsvWriter::format_double(r.metrics.final_return_mean),
                           CsvWriter::format_double(r.metrics.final_return_std),
                           CsvWriter::format_double(r.metrics.normalized_auc),
                           CsvWriter::format_double(r.metrics.action_repetition_pct),
                           CsvWriter::format_double(r.metrics.decisions_mean),
                           CsvWriter::format_double(r.fast_active_fraction),
                           CsvWriter::format_double(r.gate_open_fraction)});
  }
  metrics.add_row_mixed(
      {"mean", CsvWriter::format_double(result.aggregate.final_return_mean),
       CsvWriter::format_double(result.aggregate.final_return_std),
       CsvWriter::format_double(result.aggregate.normalized_auc),
       CsvWriter::format_double(result.aggregate.action_repetition_pct),
       CsvWriter::format_double(result.aggregate.decisions_mean),
       CsvWriter::format_double(mean_of(
           [](const SeedResult& r) { return r.fast_active_fraction; })),
       CsvWriter::format_double(mean_of(
           [](const SeedResult& r) { return r.gate_open_fraction; }))});
  metrics.write_file((out / "metrics.csv").string());

  SvgSeries series;
  series.label = c.algorithm + " / " + c.env_id;
  series.color = "#1f77b4";
  for (const EvalPoint& p : result.aggregate.learning_curve) {
    series.x.push_back(static_cast<double>(p.step));
    series.mean.push_back(p.mean);
    series.stddev.push_back(p.stddev);
  }
  write_line_chart((out / "curve.svg").string(), "Learning curve", "environment steps",
                   "evaluation return", {series});
  return result;
}

std::vector<SweepRow> threshold_sweep(Env& env, Td3Agent& slow_agent,
                                      Td3Agent& fast_agent, const TlaConfig& config,
                                      std::vector<double> thresholds, int episodes,
                                      std::uint64_t seed) {
  check(!thresholds.empty(), "threshold_sweep: no thresholds");
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<SweepRow> rows;
  for (double t : thresholds) {
    TlaEvalResult ev = eval_tla_c(env, slow_agent, fast_agent, config, t, episodes, seed);
    SweepRow row;
    row.threshold = t;
    row.return_mean = ev.return_mean;
    row.return_std = ev.return_std;
    row.activation_frequency = ev.fast_active_fraction;
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_artifacts(const std::vector<SweepRow>& rows, const std::string& csv_path,
                           const std::string& svg_path) {
  CsvWriter w({"threshold", "return_mean", "return_std", "activation_frequency"});
  for (const SweepRow& r : rows)
    w.add_row({r.threshold, r.return_mean, r.return_std, r.activation_frequency});
  w.write_file(csv_path);

  SvgSeries ret, act;
  ret.label = "return";
  ret.color = "#1f77b4";
  act.label = "fast activation freq";
  act.color = "#d62728";
  for (const SweepRow& r : rows) {
    ret.x.push_back(r.threshold);
    ret.mean.push_back(r.return_mean);
    act.x.push_back(r.threshold);
    // Scaled onto the return axis range for a one-panel chart; the CSV holds
    // the raw fraction.
    act.mean.push_back(r.activation_frequency);
  }
  write_line_chart(svg_path, "Threshold sweep", "threshold", "return / activation",
                   {ret, act});
}

std::vector<double> parse_threshold_range(const std::string& text) {
  const std::size_t c1 = text.find(':');
  const std::size_t c2 = text.rfind(':');
  check(c1 != std::string::npos && c2 != c1,
        "thresholds: expected start:step:stop, got '" + text + "'");
  const double start = std::stod(text.substr(0, c1));
  const double step = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double stop = std::stod(text.substr(c2 + 1));
  check(step > 0.0, "thresholds: step must be positive");
  check(stop >= start, "thresholds: stop must be >= start");
  std::vector<double> out;
  for (double v = start; v <= stop + 1e-12; v += step) out.push_back(v);
  return out;
}

}  // namespace tla
