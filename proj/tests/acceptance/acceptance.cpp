// Acceptance suite. Each group trains real agents at desk scale and prints
// one [PASS]/[FAIL] line per criterion it covers; the process exits nonzero
// if any criterion in the group failed. Groups:
//
//   fast         criteria 1 (gradient oracle) and 9 (exact-formula suite)
//   determinism  criterion 10 (byte-identical artifact reruns)
//   pendulum     criteria 2, 5, 6
//   mountaincar  criterion 3
//   cartpole     criteria 4, 7
//   realtime     criterion 8

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tla/config.hpp"
#include "tla/envs/multi_rate.hpp"
#include "tla/experiment.hpp"
#include "tla/metrics.hpp"
#include "tla/realtime.hpp"
#include "tla/tla.hpp"

namespace fs = std::filesystem;
using namespace tla;

namespace {

// ---------------------------------------------------------------------------
// Pinned experiment budgets and tolerances.

const std::vector<std::uint64_t> kSeeds = {1, 2, 3, 4, 5};
constexpr int kEvalEpisodes = 10;

// Criterion 2: plain learner on the pendulum.
constexpr std::uint64_t kPendulumTd3Steps = 30'000;
constexpr double kPendulumReturnFloor = -200.0;

// Criteria 5/6: layered pendulum runs. The evaluation threshold is the tuned
// value used for the repetition metric.
constexpr std::uint64_t kPendulumSlowPretrain = 40'000;  // base steps at n=4
constexpr std::uint64_t kPendulumTlacFastSteps = 30'000;
constexpr std::uint64_t kPendulumTlaoSteps = 30'000;
constexpr double kPendulumThreshold = 0.5;
constexpr double kTlacRepetitionFloor = 50.0;   // percent
constexpr double kTd3RepetitionCeiling = 15.0;  // percent
constexpr double kTlaoDecisionCeiling = 200.0;  // per 200-step episode

// Criterion 3: mountain car. The slow layer explores with action repetition,
// so its uniform warmup is longer, and its budget covers the late
// breakthrough this task shows (flat, fuel-burning dip, then goal runs).
constexpr std::uint64_t kMcSlowPretrain = 88'000;  // base steps at n=4
constexpr std::uint64_t kMcSlowWarmup = 5'000;     // slow decisions
constexpr std::uint64_t kMcFastSteps = 30'000;
constexpr std::uint64_t kMcTd3Steps = 36'000;
constexpr double kMcThreshold = 0.05;
constexpr double kMcMeanFloor = 90.0;
constexpr double kMcSeedFloor = 80.0;
constexpr double kMcTd3Ceiling = 10.0;

// Criteria 4/7: cart-pole.
constexpr std::uint64_t kCpSlowPretrain = 60'000;  // base steps at n=4
constexpr std::uint64_t kCpFastSteps = 30'000;
constexpr double kCpThreshold = 0.9;  // 0.3 x max force
constexpr double kCpSweepStep = 0.3;  // thresholds 0, 0.3, ..., 3.0

// Criterion 8: real-time mode on the cart-pole, n = 2.
constexpr std::uint64_t kRtSlowPretrain = 40'000;  // base steps at n=2
constexpr std::uint64_t kRtFastSteps = 30'000;
constexpr std::uint64_t kRtTd3Steps = 40'000;
constexpr double kRtThreshold = 0.9;  // 0.3 x max action, as published
constexpr double kRtRepetitionFactor = 10.0;

// Criterion 1: gradient checks.
constexpr int kGradInputs = 20;
constexpr int kGradCoordsPerInput = 60;
constexpr double kGradRelTol = 1e-4;

// Criterion 10: determinism reruns.
constexpr std::uint64_t kDeterminismSteps = 2'500;

// ---------------------------------------------------------------------------

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

ExperimentConfig base_config(const std::string& algo, const std::string& env,
                             const std::string& out) {
  ExperimentConfig c;
  c.algorithm = algo;
  c.env_id = env;
  c.seeds = kSeeds;
  c.eval_episodes = kEvalEpisodes;
  c.out_dir = out;
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 1: finite-difference gradient checks on every architecture the
// agents instantiate, at full width.

struct ArchCase {
  std::string name;
  std::vector<std::size_t> dims;
  std::vector<Activation> acts;
  std::vector<double> scale;
};

bool check_arch_gradients(const ArchCase& arch, Rng& rng) {
  Mlp net(arch.dims, arch.acts, arch.scale);
  Rng init = rng.stream("init");
  net.init(init);

  for (int trial = 0; trial < kGradInputs; ++trial) {
    Tensor input = Tensor::zeros({1, arch.dims.front()});
    for (double& v : input.data) v = rng.uniform(-1.5, 1.5);
    std::vector<double> proj(arch.dims.back());
    for (double& v : proj) v = rng.uniform(-1.0, 1.0);

    auto loss = [&]() {
      Tensor out = net.forward(input);
      double s = 0.0;
      for (std::size_t k = 0; k < out.data.size(); ++k) s += proj[k] * out.data[k];
      return s;
    };
    loss();
    Tensor upstream({1, arch.dims.back()}, proj);
    net.backward(upstream);

    // Stratified random parameter coordinates across all layers.
    for (int c = 0; c < kGradCoordsPerInput; ++c) {
      const std::size_t li = rng.index(net.num_layers());
      const bool is_bias = rng.index(4) == 0;
      Tensor& p = is_bias ? net.layer(li).bias : net.layer(li).weight;
      const std::size_t k = rng.index(p.numel());
      const double got = p.grad[k];
      const double want = oracles::finite_difference(net, li, is_bias, k, loss);
      if (std::abs(want) < 1e-7 && std::abs(got) < 1e-7) continue;
      if (oracles::relative_error(got, want) >= kGradRelTol) {
        std::printf("  gradient mismatch: %s layer %zu %s[%zu] got %g want %g\n",
                    arch.name.c_str(), li, is_bias ? "bias" : "weight", k, got, want);
        return false;
      }
    }
  }
  return true;
}

void run_criterion_1() {
  const std::vector<ArchCase> archs = {
      {"pendulum actor", {3, 400, 300, 1}, {Activation::kTanh}, {2.0}},
      {"pendulum critic", {4, 400, 300, 1}, {Activation::kIdentity}, {1.0}},
      {"mountaincar actor", {2, 400, 300, 1}, {Activation::kTanh}, {1.0}},
      {"cartpole critic", {5, 400, 300, 1}, {Activation::kIdentity}, {1.0}},
      {"augmented fast actor", {4, 400, 300, 1}, {Activation::kTanh}, {2.0}},
      {"gated slow actor",
       {3, 400, 300, 2},
       {Activation::kTanh, Activation::kLogistic},
       {2.0, 1.0}},
      {"gated critic", {5, 400, 300, 1}, {Activation::kIdentity}, {1.0}},
      {"realtime fast actor", {6, 400, 300, 1}, {Activation::kTanh}, {3.0}},
  };
  Rng rng(20'250'809);
  bool all_ok = true;
  for (const ArchCase& a : archs) {
    Rng arch_rng = rng.stream(a.name);
    if (!check_arch_gradients(a, arch_rng)) all_ok = false;
  }
  report(1, all_ok,
         "analytic gradients match central differences (h=1e-5, rel err < 1e-4) on " +
             std::to_string(archs.size()) + " architectures x " +
             std::to_string(kGradInputs) + " inputs");
}

// ---------------------------------------------------------------------------
// Criterion 9: exact-formula property suite.

void run_criterion_9() {
  bool ok = true;
  auto expect = [&](bool cond, const char* what) {
    if (!cond) {
      std::printf("  exact-formula check failed: %s\n", what);
      ok = false;
    }
  };

  const std::vector<double> lo = {-1.0}, hi = {1.0};

  // Action combination.
  expect(combine(std::vector<double>{0.5}, std::vector<double>{0.3}, lo, hi)[0] == 0.8,
         "combine(0.5, 0.3) == 0.8");
  expect(combine(std::vector<double>{1.0}, std::vector<double>{0.4}, lo, hi)[0] == 1.0,
         "combine saturates at a_max");
  expect(combine(std::vector<double>{-0.37}, std::vector<double>{0.0}, lo, hi)[0] ==
             -0.37,
         "zero fast action preserves the slow action");

  // Threshold gating.
  expect(threshold_fast(std::vector<double>{0.2}, std::vector<double>{0.3}, lo, hi,
                        0.0)[0] == 0.3,
         "threshold 0 never suppresses");
  expect(threshold_fast(std::vector<double>{1.0}, std::vector<double>{0.5}, lo, hi,
                        0.1)[0] == 0.0,
         "saturated slow action suppresses the fast action");
  {
    const std::vector<double> lo2 = {-1, -1}, hi2 = {1, 1};
    const std::vector<double> kept = threshold_fast(
        std::vector<double>{0, 0}, std::vector<double>{0.4, 0.0}, lo2, hi2, 0.3);
    expect(kept[0] == 0.4 && kept[1] == 0.0, "joint mode keeps qualifying vectors");
    const std::vector<double> per = threshold_fast(
        std::vector<double>{0, 0}, std::vector<double>{0.4, 0.0}, lo2, hi2, 0.3, true);
    expect(per[0] == 0.4 && per[1] == 0.0, "per-dimension mode");
    expect(threshold_fast(std::vector<double>{0.1}, std::vector<double>{0.5}, lo, hi,
                          2.1)[0] == 0.0,
           "threshold above the range suppresses everything");
  }

  // Reward shaping.
  expect(fast_reward_shaping(1.0, std::vector<double>{0.2, -0.4}, 0.5) == 0.85,
         "fast penalty: 1 - 0.5 * 0.3");
  expect(gate_reward_shaping(-1.0, 0) == -2.0, "gate 0 doubles negative rewards");
  expect(gate_reward_shaping(-1.0, 1) == -1.0, "gate 1 keeps negative rewards");
  expect(gate_reward_shaping(2.0, 0) == 1.0, "gate 0 halves positive rewards");
  expect(gate_reward_shaping(2.0, 1) == 2.0, "gate 1 keeps positive rewards");

  // Replay: FIFO overwrite and uniform sampling.
  {
    ReplayBuffer buf(4, 1, 1);
    for (int i = 0; i < 6; ++i)
      buf.add(std::vector<double>{0.0}, std::vector<double>{0.0},
              static_cast<double>(i), std::vector<double>{0.0}, 1.0);
    bool fifo = buf.size() == 4;
    for (int i = 0; i < 4; ++i) fifo = fifo && buf.get(i).reward == i + 2;
    expect(fifo, "ring overwrites oldest first");

    ReplayBuffer big(50, 1, 1);
    for (int i = 0; i < 50; ++i)
      big.add(std::vector<double>{0.0}, std::vector<double>{0.0},
              static_cast<double>(i), std::vector<double>{0.0}, 1.0);
    Rng rng(5);
    Batch b = big.sample(50'000, rng);
    std::map<int, int> counts;
    for (double r : b.rewards) counts[static_cast<int>(r)]++;
    const double expect_n = 1000.0, sigma = std::sqrt(50000 * 0.02 * 0.98);
    bool uniform = true;
    for (int i = 0; i < 50; ++i)
      uniform = uniform && std::abs(counts[i] - expect_n) < 5.0 * sigma;
    expect(uniform, "uniform sampling within 5 sigma");
  }

  // Twin-min TD target and policy-delay counting.
  {
    Td3Config c;
    c.state_dim = 2;
    c.action_dim = 1;
    c.action_low = {-1};
    c.action_high = {1};
    c.hidden1 = 8;
    c.hidden2 = 8;
    c.discount = 0.5;
    c.batch_size = 4;
    c.buffer_capacity = 64;
    c.warmup_steps = 0;
    c.policy_delay = 2;
    Td3Agent agent(c, 1);
    auto zero = [](Mlp& m) {
      for (std::size_t i = 0; i < m.num_layers(); ++i) {
        std::fill(m.layer(i).weight.data.begin(), m.layer(i).weight.data.end(), 0.0);
        std::fill(m.layer(i).bias.data.begin(), m.layer(i).bias.data.end(), 0.0);
      }
    };
    zero(agent.critic1_target());
    zero(agent.critic2_target());
    agent.critic1_target().layer(2).bias.data[0] = 4.0;
    agent.critic2_target().layer(2).bias.data[0] = -1.0;
    Batch b;
    b.states = Tensor::zeros({2, 2});
    b.actions = Tensor::zeros({2, 1});
    b.next_states = Tensor::zeros({2, 2});
    b.rewards = {1.0, -2.0};
    b.masks = {1.0, 1.0};
    const std::vector<double> y = agent.compute_td_targets(b);
    expect(y[0] == 1.0 + 0.5 * -1.0 && y[1] == -2.0 + 0.5 * -1.0,
           "target bootstraps from min(Q1', Q2')");

    Rng rng(2);
    for (int i = 0; i < 16; ++i)
      agent.record(std::vector<double>{rng.uniform(-1, 1), 0.0},
                   std::vector<double>{0.0}, 0.0,
                   std::vector<double>{rng.uniform(-1, 1), 0.0}, 1.0);
    for (int k = 1; k <= 9; ++k) agent.update();
    expect(agent.critic_updates() == 9 && agent.actor_updates() == 4,
           "floor(k/d) actor updates after k critic updates");
  }

  // Soft-update geometry.
  {
    Mlp a({2, 4, 1}, Activation::kIdentity);
    Mlp b({2, 4, 1}, Activation::kIdentity);
    Rng rng(3);
    b.init(rng);
    const double d0 = max_param_distance(a, b);
    soft_update(a, b, 0.005);
    const double d1 = max_param_distance(a, b);
    expect(std::abs(d1 - d0 * 0.995) < 1e-12, "soft_update contracts by (1 - tau)");
    soft_update(a, b, 1.0);
    expect(max_param_distance(a, b) == 0.0, "tau = 1 copies the source");
  }

  // Layered trajectory equalities.
  {
    Td3Config sc;
    sc.state_dim = 3;
    sc.action_dim = 1;
    sc.action_low = {-2};
    sc.action_high = {2};
    sc.hidden1 = 16;
    sc.hidden2 = 12;
    sc.batch_size = 4;
    sc.buffer_capacity = 64;
    Td3Agent slow(sc, 10);
    slow.set_action_repeat(4);
    Td3Config fc = sc;
    fc.state_dim = 4;
    Td3Agent fast(fc, 11);
    for (std::size_t i = 0; i < fast.actor().num_layers(); ++i) {
      std::fill(fast.actor().layer(i).weight.data.begin(),
                fast.actor().layer(i).weight.data.end(), 0.0);
      std::fill(fast.actor().layer(i).bias.data.begin(),
                fast.actor().layer(i).bias.data.end(), 0.0);
    }
    TlaConfig cfg;
    cfg.n = 4;
    auto env = make_env("pendulum");
    TlaEvalResult layered = eval_tla_c(*env, slow, fast, cfg, 0.0, 1, 99);

    auto env2 = make_env("pendulum");
    MultiRateStepper mrs(*env2, 4);
    std::vector<double> s = mrs.reset(derive_seed(99, "eval_episode", 0));
    bool equal = true;
    std::size_t t = 0;
    while (t < layered.traces[0].steps()) {
      const std::vector<double> a = slow.select_action(s, ActionMode::kGreedy);
      StepResult r = mrs.step(a);
      for (int k = 0; k < 4 && t < layered.traces[0].steps(); ++k, ++t)
        equal = equal && layered.traces[0].executed[t] == a;
      s = r.next_state;
      if (r.done()) break;
    }
    expect(equal, "zero fast net reproduces the slow trajectory with repetition");

    Td3Config gc = sc;
    gc.gated_head = true;
    Td3Agent gated(gc, 12);
    Td3Agent fast_plain(sc, 13);
    TlaConfig ocfg;
    ocfg.variant = TlaConfig::Variant::kOpenLoop;
    ocfg.n = 4;
    TlaEvalResult forced =
        eval_tla_o(*env, gated, fast_plain, ocfg, 1, 123, /*force_gate=*/0);
    auto env3 = make_env("pendulum");
    std::vector<double> s3 = env3->reset(derive_seed(123, "eval_episode", 0));
    bool equal_fast = true;
    for (std::size_t k = 0; k < forced.traces[0].steps(); ++k) {
      const std::vector<double> a = fast_plain.select_action(s3, ActionMode::kGreedy);
      equal_fast = equal_fast && forced.traces[0].executed[k] == a;
      StepResult r = env3->step(a);
      s3 = r.next_state;
      if (r.done()) break;
    }
    expect(equal_fast, "gate forced to 0 reproduces the fast agent's trajectory");
  }

  report(9, ok,
         "exact-formula suite: combination, threshold, gate shaping, replay, "
         "twin-min target, policy delay, soft updates, trajectory equalities");
}

// ---------------------------------------------------------------------------
// Criterion 10: determinism.

bool dirs_byte_identical(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> rel;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), a));
  std::sort(rel.begin(), rel.end());
  for (const fs::path& r : rel) {
    std::ifstream fa(a / r, std::ios::binary), fb(b / r, std::ios::binary);
    if (!fa || !fb) return false;
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() != sb.str()) {
      std::printf("  artifact differs between reruns: %s\n", r.string().c_str());
      return false;
    }
  }
  return true;
}

void run_criterion_10() {
  fs::remove_all("acceptance_artifacts/determinism");
  bool ok = true;

  ExperimentConfig td3 = base_config("td3", "pendulum", "");
  td3.seeds = {1, 2};
  td3.total_steps = kDeterminismSteps;
  td3.eval_every = 500;
  td3.eval_episodes = 3;

  for (const char* algo : {"td3", "tla_o"}) {
    ExperimentConfig c = td3;
    c.algorithm = algo;
    if (std::strcmp(algo, "tla_o") == 0) {
      c.fast_checkpoint = "acceptance_artifacts/determinism/td3_a/seed_{seed}/agent.ckpt";
      c.n = 4;
    }
    c.out_dir = std::string("acceptance_artifacts/determinism/") + algo + "_a";
    run_experiment(c);
    c.out_dir = std::string("acceptance_artifacts/determinism/") + algo + "_b";
    run_experiment(c);
    const bool same = dirs_byte_identical(
        std::string("acceptance_artifacts/determinism/") + algo + "_a",
        std::string("acceptance_artifacts/determinism/") + algo + "_b");
    if (!same) ok = false;
  }
  report(10, ok,
         "identical config+seed reruns produce byte-identical CSVs, checkpoints "
         "and plots (td3 and tla_o pipelines)");
}

// ---------------------------------------------------------------------------
// Pendulum group: criteria 2, 5, 6.

void run_pendulum_group() {
  const std::string dir = "acceptance_artifacts/pendulum";

  ExperimentConfig td3 = base_config("td3", "pendulum", dir + "/td3");
  td3.total_steps = kPendulumTd3Steps;
  ExperimentResult td3_res = run_experiment(td3);
  std::printf("  td3 final %.2f, auc %.4f, repetition %.2f%%\n",
              td3_res.aggregate.final_return_mean, td3_res.aggregate.normalized_auc,
              td3_res.aggregate.action_repetition_pct);

  report(2, td3_res.aggregate.final_return_mean >= kPendulumReturnFloor,
         "td3/pendulum mean final return " + fmt(td3_res.aggregate.final_return_mean) +
             " >= " + fmt(kPendulumReturnFloor) + " (5 seeds x " +
             std::to_string(kPendulumTd3Steps) + " steps)");

  ExperimentConfig tlac = base_config("tla_c", "pendulum", dir + "/tla_c");
  tlac.pretrain_steps = kPendulumSlowPretrain;
  tlac.total_steps = kPendulumTlacFastSteps;
  tlac.n = 4;
  tlac.threshold = kPendulumThreshold;
  ExperimentResult tlac_res = run_experiment(tlac);
  std::printf("  tla_c final %.2f, auc %.4f, repetition %.2f%%\n",
              tlac_res.aggregate.final_return_mean, tlac_res.aggregate.normalized_auc,
              tlac_res.aggregate.action_repetition_pct);

  ExperimentConfig tlao = base_config("tla_o", "pendulum", dir + "/tla_o");
  tlao.total_steps = kPendulumTlaoSteps;
  tlao.n = 4;
  tlao.fast_checkpoint = dir + "/td3/seed_{seed}/agent.ckpt";
  ExperimentResult tlao_res = run_experiment(tlao);
  std::printf("  tla_o final %.2f, auc %.4f, decisions %.2f\n",
              tlao_res.aggregate.final_return_mean, tlao_res.aggregate.normalized_auc,
              tlao_res.aggregate.decisions_mean);

  const bool auc_ok =
      tlac_res.aggregate.normalized_auc > td3_res.aggregate.normalized_auc &&
      tlao_res.aggregate.normalized_auc > td3_res.aggregate.normalized_auc;
  report(5, auc_ok,
         "pendulum AUC ordering: tla_c " + fmt(tlac_res.aggregate.normalized_auc) +
             " > td3 " + fmt(td3_res.aggregate.normalized_auc) + " and tla_o " +
             fmt(tlao_res.aggregate.normalized_auc) + " > td3, matched seeds");

  const bool rep_ok =
      tlac_res.aggregate.action_repetition_pct >= kTlacRepetitionFloor &&
      td3_res.aggregate.action_repetition_pct < kTd3RepetitionCeiling &&
      tlao_res.aggregate.decisions_mean < kTlaoDecisionCeiling;
  report(6, rep_ok,
         "tla_c repetition " + fmt(tlac_res.aggregate.action_repetition_pct) +
             "% >= 50%, td3 " + fmt(td3_res.aggregate.action_repetition_pct) +
             "% < 15%, tla_o decisions " + fmt(tlao_res.aggregate.decisions_mean) +
             " < 200");
}

// ---------------------------------------------------------------------------
// Mountain car group: criterion 3.

void run_mountaincar_group() {
  const std::string dir = "acceptance_artifacts/mountaincar";

  ExperimentConfig tlac = base_config("tla_c", "mountaincar", dir + "/tla_c");
  tlac.pretrain_steps = kMcSlowPretrain;
  tlac.pretrain_warmup_steps = kMcSlowWarmup;
  tlac.total_steps = kMcFastSteps;
  tlac.n = 4;
  tlac.threshold = kMcThreshold;
  ExperimentResult tlac_res = run_experiment(tlac);

  double min_seed = 1e300;
  for (const SeedResult& s : tlac_res.per_seed) {
    std::printf("  tla_c seed %llu final %.2f\n",
                static_cast<unsigned long long>(s.seed), s.metrics.final_return_mean);
    min_seed = std::min(min_seed, s.metrics.final_return_mean);
  }

  ExperimentConfig td3 = base_config("td3", "mountaincar", dir + "/td3");
  td3.total_steps = kMcTd3Steps;
  ExperimentResult td3_res = run_experiment(td3);
  int td3_failing = 0;
  for (const SeedResult& s : td3_res.per_seed) {
    std::printf("  td3 seed %llu final %.2f\n",
                static_cast<unsigned long long>(s.seed), s.metrics.final_return_mean);
    if (s.metrics.final_return_mean <= kMcTd3Ceiling) ++td3_failing;
  }

  const bool ok = tlac_res.aggregate.final_return_mean >= kMcMeanFloor &&
                  min_seed > kMcSeedFloor && td3_failing >= 3;
  report(3, ok,
         "tla_c/mountaincar mean " + fmt(tlac_res.aggregate.final_return_mean) +
             " >= 90, min seed " + fmt(min_seed) + " > 80; td3 <= +10 on " +
             std::to_string(td3_failing) + "/5 seeds");
}

// ---------------------------------------------------------------------------
// Cart-pole group: criteria 4 and 7.

void run_cartpole_group() {
  const std::string dir = "acceptance_artifacts/cartpole";

  ExperimentConfig tlac = base_config("tla_c", "cartpole", dir + "/tla_c");
  tlac.pretrain_steps = kCpSlowPretrain;
  tlac.total_steps = kCpFastSteps;
  tlac.n = 4;
  tlac.threshold = kCpThreshold;
  ExperimentResult res = run_experiment(tlac);

  bool all_full = true;
  for (const SeedResult& s : res.per_seed) {
    std::printf("  tla_c/cartpole seed %llu final %.2f\n",
                static_cast<unsigned long long>(s.seed), s.metrics.final_return_mean);
    all_full = all_full && s.metrics.final_return_mean == 1000.0;
  }
  report(4, all_full, "tla_c/cartpole final eval return = 1000 on all 5 seeds");

  // Threshold sweep on the first seed's trained pair.
  Td3Agent slow = Td3Agent::load_file(dir + "/tla_c/seed_1/slow.ckpt");
  Td3Agent fast = Td3Agent::load_file(dir + "/tla_c/seed_1/fast.ckpt");
  auto env = make_env("cartpole");
  TlaConfig cfg;
  cfg.n = 4;
  std::vector<double> thresholds;
  for (double t = 0.0; t <= 3.0 + 1e-9; t += kCpSweepStep) thresholds.push_back(t);
  const std::vector<SweepRow> rows =
      threshold_sweep(*env, slow, fast, cfg, thresholds, kEvalEpisodes, 1);
  write_sweep_artifacts(rows, dir + "/sweep.csv", dir + "/sweep.svg");

  bool monotone = true, endpoints = true, contiguous = true;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    monotone = monotone && rows[i + 1].activation_frequency <=
                               rows[i].activation_frequency + 1e-12;
  endpoints = rows.front().return_mean == 1000.0 && rows.back().return_mean == 1000.0;
  // Sub-1000 thresholds, if any, must form one interior band.
  std::vector<bool> dip;
  for (const SweepRow& r : rows) dip.push_back(r.return_mean < 1000.0);
  int transitions = 0;
  for (std::size_t i = 0; i + 1 < dip.size(); ++i)
    if (dip[i] != dip[i + 1]) ++transitions;
  contiguous = transitions <= 2 && !dip.front() && !dip.back();
  for (const SweepRow& r : rows)
    std::printf("  sweep thresh %.2f return %.1f activation %.3f\n", r.threshold,
                r.return_mean, r.activation_frequency);

  report(7, monotone && endpoints && contiguous,
         "cart-pole sweep: activation frequency non-increasing, return 1000 at "
         "the endpoints, sub-1000 returns confined to one interior band");
}

// ---------------------------------------------------------------------------
// Real-time group: criterion 8.

void run_realtime_group() {
  const std::string dir = "acceptance_artifacts/realtime";

  // Shift-equivalence oracle: exact trace comparison on all three tasks.
  bool shift_ok = true;
  for (const char* id : {"pendulum", "mountaincar", "cartpole"}) {
    auto base1 = make_env(id);
    auto base2 = make_env(id);
    DelayedEnv delayed(*base1);
    delayed.reset(31);
    base2->reset(31);
    Rng rng(32);
    std::vector<std::vector<double>> applied_ref, delayed_states;
    std::vector<double> chosen;
    for (int t = 0; t < 60; ++t) {
      const double a = rng.uniform(-1, 1);
      chosen.push_back(a);
      StepResult r = delayed.step(std::vector<double>{a});
      delayed_states.push_back(r.next_state);
      if (r.done()) break;
    }
    std::vector<double> applied = {0.0};
    applied.insert(applied.end(), chosen.begin(), chosen.end() - 1);
    for (std::size_t t = 0; t < delayed_states.size(); ++t) {
      StepResult r = base2->step(std::vector<double>{applied[t]});
      for (std::size_t i = 0; i < r.next_state.size(); ++i)
        shift_ok = shift_ok && delayed_states[t][i] == r.next_state[i];
      if (r.done()) break;
    }
  }

  ExperimentConfig rt = base_config("tla_realtime", "cartpole", dir + "/tla");
  rt.pretrain_steps = kRtSlowPretrain;
  rt.total_steps = kRtFastSteps;
  rt.n = 2;
  rt.threshold = kRtThreshold;
  ExperimentResult tla_res = run_experiment(rt);
  std::printf("  tla_realtime final %.2f, repetition %.2f%%\n",
              tla_res.aggregate.final_return_mean,
              tla_res.aggregate.action_repetition_pct);

  ExperimentConfig td3 = base_config("td3_delayed", "cartpole", dir + "/td3");
  td3.total_steps = kRtTd3Steps;
  ExperimentResult td3_res = run_experiment(td3);
  std::printf("  td3_delayed final %.2f, repetition %.2f%%\n",
              td3_res.aggregate.final_return_mean,
              td3_res.aggregate.action_repetition_pct);

  const bool return_ok =
      tla_res.aggregate.final_return_mean >= td3_res.aggregate.final_return_mean;
  const bool rep_ok = tla_res.aggregate.action_repetition_pct >=
                      kRtRepetitionFactor * td3_res.aggregate.action_repetition_pct &&
                      tla_res.aggregate.action_repetition_pct > 0.0;
  report(8, shift_ok && return_ok && rep_ok,
         "delay wrapper shift-equivalence exact; tla_realtime return " +
             fmt(tla_res.aggregate.final_return_mean) + " >= td3_delayed " +
             fmt(td3_res.aggregate.final_return_mean) + "; repetition " +
             fmt(tla_res.aggregate.action_repetition_pct) + "% >= 10 x " +
             fmt(td3_res.aggregate.action_repetition_pct) + "%");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr,
                 "usage: acceptance "
                 "<fast|determinism|pendulum|mountaincar|cartpole|realtime|all>\n");
    return 2;
  }
  const std::string group = argv[1];
  fs::create_directories("acceptance_artifacts");
  try {
    if (group == "fast" || group == "all") {
      run_criterion_1();
      run_criterion_9();
    }
    if (group == "determinism" || group == "all") run_criterion_10();
    if (group == "pendulum" || group == "all") run_pendulum_group();
    if (group == "mountaincar" || group == "all") run_mountaincar_group();
    if (group == "cartpole" || group == "all") run_cartpole_group();
    if (group == "realtime" || group == "all") run_realtime_group();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance group %s aborted: %s\n", group.c_str(), e.what());
    return 1;
  }
  return g_failures == 0 ? 0 : 1;
}
