#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "tla/config.hpp"
#include "tla/csv.hpp"
#include "tla/envs/multi_rate.hpp"
#include "tla/experiment.hpp"
#include "tla/metrics.hpp"
#include "tla/realtime.hpp"
#include "tla/svg.hpp"
#include "tla/tla.hpp"

namespace fs = std::filesystem;

namespace {

struct TrainArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string algo, env, seeds, out;
  std::int64_t steps = -1, pretrain_steps = -1, eval_every = -1, n = -1, workers = -1;
  double threshold = -1.0, lambda = -1.0;
  bool realtime = false;
};

int cmd_train(const TrainArgs& a) {
  tla::ExperimentConfig c =
      a.config_path.empty() ? tla::ExperimentConfig{} : tla::parse_config_file(a.config_path);
  if (!a.algo.empty()) tla::apply_override(c, "algo", a.algo);
  if (!a.env.empty()) tla::apply_override(c, "env", a.env);
  if (!a.seeds.empty()) tla::apply_override(c, "seeds", a.seeds);
  if (!a.out.empty()) tla::apply_override(c, "out", a.out);
  if (a.steps >= 0) c.total_steps = static_cast<std::uint64_t>(a.steps);
  if (a.pretrain_steps >= 0) c.pretrain_steps = static_cast<std::uint64_t>(a.pretrain_steps);
  if (a.eval_every >= 0) c.eval_every = static_cast<std::uint64_t>(a.eval_every);
  if (a.n >= 0) c.n = static_cast<int>(a.n);
  if (a.workers >= 0) c.workers = static_cast<int>(a.workers);
  if (a.threshold >= 0.0) c.threshold = a.threshold;
  if (a.lambda >= 0.0) c.lambda = a.lambda;
  if (a.realtime) c.realtime = true;
  for (const std::string& kv : a.overrides) {
    const std::size_t eq = kv.find('=');
    tla::check(eq != std::string::npos, "--set expects key=value, got '" + kv + "'");
    tla::apply_override(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  c.finalize();

  std::printf("training %s on %s: %zu seed(s), %llu steps -> %s\n", c.algorithm.c_str(),
              c.env_id.c_str(), c.seeds.size(),
              static_cast<unsigned long long>(c.total_steps), c.out_dir.c_str());
  tla::ExperimentResult res = tla::run_experiment(c);
  std::printf("final return %.2f (%.2f)  auc %.4f  repetition %.2f%%  decisions %.2f\n",
              res.aggregate.final_return_mean, res.aggregate.final_return_std,
              res.aggregate.normalized_auc, res.aggregate.action_repetition_pct,
              res.aggregate.decisions_mean);
  return 0;
}

struct EvalArgs {
  std::string algo = "td3";
  std::string env = "pendulum";
  std::string checkpoint, slow, fast;
  int episodes = 10;
  std::uint64_t seed = 0;
  int n = 4;
  double threshold = 0.0;
  bool delayed = false;
  bool augment = true;
  std::string out_trace, out_activations;
};

void dump_trace(const std::string& path, const tla::RolloutTrace& trace) {
  std::vector<std::string> header = {"t"};
  for (std::size_t i = 0; i < trace.states[0].size(); ++i)
    header.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < trace.executed[0].size(); ++i)
    header.push_back("a" + std::to_string(i));
  header.push_back("r");
  header.push_back("terminated");
  header.push_back("truncated");
  tla::CsvWriter w(header);
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

int cmd_eval(const EvalArgs& a) {
  auto base = tla::make_env(a.env);
  tla::TlaConfig cfg;
  cfg.n = a.n;
  cfg.threshold = a.threshold;
  cfg.augment_enabled = a.augment;

  std::vector<tla::RolloutTrace> traces;
  double mean = 0.0, stddev = 0.0;
  if (a.algo == "td3" || a.algo == "td3_delayed") {
    tla::check(!a.checkpoint.empty(), "eval: --checkpoint required for flat agents");
    tla::Td3Agent agent = tla::Td3Agent::load_file(a.checkpoint);
    tla::DelayedEnv delayed(*base);
    tla::Env& env = (a.delayed || a.algo == "td3_delayed")
                        ? static_cast<tla::Env&>(delayed)
                        : *base;
    tla::FlatEvalResult res =
        tla::evaluate_agent_traces(env, agent, a.episodes, a.seed);
    mean = res.return_mean;
    stddev = res.return_std;
    traces = std::move(res.traces);
  } else {
    tla::check(!a.slow.empty() && !a.fast.empty(),
               "eval: layered algorithms need --slow and --fast");
    tla::Td3Agent slow = tla::Td3Agent::load_file(a.slow);
    tla::Td3Agent fast = tla::Td3Agent::load_file(a.fast);
    if (a.algo == "tla_c") {
      cfg.variant = tla::TlaConfig::Variant::kClosedLoop;
      tla::TlaEvalResult res =
          tla::eval_tla_c(*base, slow, fast, cfg, a.threshold, a.episodes, a.seed);
      mean = res.return_mean;
      stddev = res.return_std;
      traces = std::move(res.traces);
      if (!a.out_activations.empty() && !res.activation_log.empty()) {
        std::vector<std::string> header = {"t"};
        for (std::size_t i = 0; i < res.activation_log[0].state.size(); ++i)
          header.push_back("state" + std::to_string(i));
        for (std::size_t i = 0; i < res.activation_log[0].slow_action.size(); ++i)
          header.push_back("a_slow" + std::to_string(i));
        for (std::size_t i = 0; i < res.activation_log[0].fast_action.size(); ++i)
          header.push_back("a_fast" + std::to_string(i));
        header.push_back("suppressed");
        tla::CsvWriter w(header);
        for (const tla::ActivationLogRow& r : res.activation_log) {
          std::vector<double> row = {static_cast<double>(r.t)};
          row.insert(row.end(), r.state.begin(), r.state.end());
          row.insert(row.end(), r.slow_action.begin(), r.slow_action.end());
          row.insert(row.end(), r.fast_action.begin(), r.fast_action.end());
          row.push_back(r.suppressed ? 1.0 : 0.0);
          w.add_row(row);
        }
        w.write_file(a.out_activations);
      }
    } else if (a.algo == "tla_o") {
      cfg.variant = tla::TlaConfig::Variant::kOpenLoop;
      tla::TlaEvalResult res =
          tla::eval_tla_o(*base, slow, fast, cfg, a.episodes, a.seed);
      mean = res.return_mean;
      stddev = res.return_std;
      traces = std::move(res.traces);
    } else if (a.algo == "tla_realtime") {
      cfg.variant = tla::TlaConfig::Variant::kClosedLoop;
      tla::RealtimeEvalResult res = tla::eval_tla_realtime(
          *base, slow, fast, cfg, a.threshold, a.episodes, a.seed);
      mean = res.return_mean;
      stddev = res.return_std;
      traces = std::move(res.traces);
    } else {
      throw tla::ContractError("eval: unknown algorithm '" + a.algo + "'");
    }
  }

  std::printf("return %.3f (%.3f) over %d episodes\n", mean, stddev, a.episodes);
  std::printf("action repetition %.2f%%  decisions %.2f\n",
              tla::action_repetition(traces), tla::count_decisions(traces));
  if (!a.out_trace.empty()) dump_trace(a.out_trace, traces.front());
  return 0;
}

struct SweepArgs {
  std::string slow, fast, env = "cartpole", thresholds = "0:0.05:1.0", out = "sweep";
  int n = 4, episodes = 10;
  std::uint64_t seed = 0;
  bool augment = true;
};

int cmd_sweep(const SweepArgs& a) {
  auto env = tla::make_env(a.env);
  tla::Td3Agent slow = tla::Td3Agent::load_file(a.slow);
  tla::Td3Agent fast = tla::Td3Agent::load_file(a.fast);
  tla::TlaConfig cfg;
  cfg.variant = tla::TlaConfig::Variant::kClosedLoop;
  cfg.n = a.n;
  cfg.augment_enabled = a.augment;
  const std::vector<double> thresholds = tla::parse_threshold_range(a.thresholds);
  const std::vector<tla::SweepRow> rows =
      tla::threshold_sweep(*env, slow, fast, cfg, thresholds, a.episodes, a.seed);
  fs::create_directories(a.out);
  tla::write_sweep_artifacts(rows, (fs::path(a.out) / "sweep.csv").string(),
                             (fs::path(a.out) / "sweep.svg").string());
  for (const tla::SweepRow& r : rows)
    std::printf("thresh %.3f  return %.2f (%.2f)  activation %.3f\n", r.threshold,
                r.return_mean, r.return_std, r.activation_frequency);
  return 0;
}

struct PlotArgs {
  std::string csv, out = "plot.svg", title = "curve";
};

int cmd_plot(const PlotArgs& a) {
  tla::CsvTable t = tla::read_csv_file(a.csv);
  tla::SvgSeries s;
  s.color = "#1f77b4";
  std::string x_label, y_label;
  if (!t.header.empty() && t.header[0] == "threshold") {
    s.label = "return";
    x_label = "threshold";
    y_label = "return";
    const std::size_t xc = t.column("threshold");
    const std::size_t yc = t.column("return_mean");
    const std::size_t sc = t.column("return_std");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      s.x.push_back(t.number(r, xc));
      s.mean.push_back(t.number(r, yc));
      s.stddev.push_back(t.number(r, sc));
    }
  } else {
    s.label = "eval return";
    x_label = "environment steps";
    y_label = "evaluation return";
    const std::size_t xc = t.column("step");
    const std::size_t yc = t.column("eval_return_mean");
    const std::size_t sc = t.column("eval_return_std");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      s.x.push_back(t.number(r, xc));
      s.mean.push_back(t.number(r, yc));
      s.stddev.push_back(t.number(r, sc));
    }
  }
  tla::write_line_chart(a.out, a.title, x_label, y_label, {s});
  std::printf("wrote %s\n", a.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporally layered continuous-control experiments"};
  app.require_subcommand(1);

  TrainArgs ta;
  CLI::App* train = app.add_subcommand("train", "Run a training experiment");
  train->add_option("--config", ta.config_path, "key=value config file");
  train->add_option("--algo", ta.algo, "td3 | tla_c | tla_o | td3_delayed | tla_realtime");
  train->add_option("--env", ta.env, "pendulum | mountaincar | cartpole");
  train->add_option("--seed,--seeds", ta.seeds, "comma-separated seed list");
  train->add_option("--steps", ta.steps, "base-step budget of the trained layer");
  train->add_option("--pretrain-steps", ta.pretrain_steps, "budget of the frozen layer");
  train->add_option("--eval-every", ta.eval_every, "evaluation cadence in steps");
  train->add_option("--n", ta.n, "timestep ratio t_slow = n * t_fast");
  train->add_option("--threshold", ta.threshold, "evaluation fast-action threshold");
  train->add_option("--lambda", ta.lambda, "fast-action penalty coefficient");
  train->add_flag("--realtime", ta.realtime, "one-decision delay per layer");
  train->add_option("--out", ta.out, "artifact directory");
  train->add_option("--workers", ta.workers, "parallel seed workers");
  train->add_option("--set", ta.overrides, "extra key=value override")->take_all();

  EvalArgs ea;
  CLI::App* ev = app.add_subcommand("eval", "Evaluate trained agents");
  ev->add_option("--algo", ea.algo, "td3 | td3_delayed | tla_c | tla_o | tla_realtime");
  ev->add_option("--env", ea.env, "environment id");
  ev->add_option("--checkpoint", ea.checkpoint, "flat agent checkpoint");
  ev->add_option("--slow", ea.slow, "slow agent checkpoint");
  ev->add_option("--fast", ea.fast, "fast agent checkpoint");
  ev->add_option("--episodes", ea.episodes, "evaluation episodes");
  ev->add_option("--seed", ea.seed, "evaluation seed");
  ev->add_option("--n", ea.n, "timestep ratio");
  ev->add_option("--threshold", ea.threshold, "fast-action threshold");
  ev->add_flag("--delayed", ea.delayed, "evaluate through the delay wrapper");
  ev->add_flag("!--no-augment", ea.augment, "fast inputs carry no slow action");
  ev->add_option("--out-trace", ea.out_trace, "trajectory CSV path");
  ev->add_option("--out-activations", ea.out_activations, "activation log CSV path");

  SweepArgs sa;
  CLI::App* sw = app.add_subcommand("sweep", "Threshold sweep of a trained pair");
  sw->add_option("--slow", sa.slow, "slow agent checkpoint")->required();
  sw->add_option("--fast", sa.fast, "fast agent checkpoint")->required();
  sw->add_option("--env", sa.env, "environment id");
  sw->add_option("--n", sa.n, "timestep ratio");
  sw->add_option("--thresholds", sa.thresholds, "start:step:stop");
  sw->add_option("--episodes", sa.episodes, "episodes per threshold");
  sw->add_option("--seed", sa.seed, "evaluation seed");
  sw->add_flag("!--no-augment", sa.augment, "fast inputs carry no slow action");
  sw->add_option("--out", sa.out, "artifact directory");

  PlotArgs pa;
  CLI::App* pl = app.add_subcommand("plot", "Render a CSV as an SVG chart");
  pl->add_option("--csv", pa.csv, "curve or sweep CSV")->required();
  pl->add_option("--out", pa.out, "output SVG path");
  pl->add_option("--title", pa.title, "chart title");

  CLI11_PARSE(app, argc, argv);
  try {
    if (train->parsed()) return cmd_train(ta);
    if (ev->parsed()) return cmd_eval(ea);
    if (sw->parsed()) return cmd_sweep(sa);
    if (pl->parsed()) return cmd_plot(pa);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
