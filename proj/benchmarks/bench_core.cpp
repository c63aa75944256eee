#include <benchmark/benchmark.h>

#include "tla/envs/env.hpp"
#include "tla/mlp.hpp"
#include "tla/replay.hpp"
#include "tla/rng.hpp"
#include "tla/td3.hpp"

namespace {

tla::Mlp make_net(std::size_t in, std::size_t out) {
  tla::Mlp net({in, 400, 300, out}, tla::Activation::kTanh,
               std::vector<double>(out, 2.0));
  tla::Rng rng(1);
  net.init(rng);
  return net;
}

tla::Tensor make_batch(std::size_t rows, std::size_t cols) {
  tla::Tensor t = tla::Tensor::zeros({rows, cols});
  tla::Rng rng(2);
  for (double& v : t.data) v = rng.uniform(-1, 1);
  return t;
}

void BM_forward_batch256(benchmark::State& state) {
  tla::Mlp net = make_net(4, 1);
  tla::Tensor input = make_batch(256, 4);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(input));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_forward_batch256);

void BM_forward_single(benchmark::State& state) {
  tla::Mlp net = make_net(4, 1);
  tla::Tensor input = make_batch(1, 4);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(input));
}
BENCHMARK(BM_forward_single);

void BM_backward_batch256(benchmark::State& state) {
  tla::Mlp net = make_net(4, 1);
  tla::Tensor input = make_batch(256, 4);
  tla::Tensor upstream = make_batch(256, 1);
  for (auto _ : state) {
    net.forward(input);
    benchmark::DoNotOptimize(net.backward(upstream));
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_backward_batch256);

void BM_critic_update(benchmark::State& state) {
  tla::Td3Config c;
  c.state_dim = 3;
  c.action_dim = 1;
  c.action_low = {-2.0};
  c.action_high = {2.0};
  tla::Td3Agent agent(c, 3);
  tla::Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> s = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-8, 8)};
    agent.record(s, std::vector<double>{rng.uniform(-2, 2)}, rng.uniform(-16, 0), s,
                 1.0);
  }
  for (auto _ : state) agent.update();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_critic_update);

void BM_env_step(benchmark::State& state, const char* id) {
  auto env = tla::make_env(id);
  env->reset(5);
  const std::vector<double> action = {0.5};
  for (auto _ : state) {
    tla::StepResult r = env->step(action);
    benchmark::DoNotOptimize(r.reward);
    if (r.done()) env->reset(6);
  }
}
BENCHMARK_CAPTURE(BM_env_step, pendulum, "pendulum");
BENCHMARK_CAPTURE(BM_env_step, mountaincar, "mountaincar");
BENCHMARK_CAPTURE(BM_env_step, cartpole, "cartpole");

void BM_replay_sample(benchmark::State& state) {
  tla::ReplayBuffer buf(1'000'000, 4, 1);
  tla::Rng rng(7);
  const std::vector<double> s = {0, 0, 0, 0};
  for (int i = 0; i < 100'000; ++i) buf.add(s, std::vector<double>{0.0}, 0.0, s, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(buf.sample(256, rng));
}
BENCHMARK(BM_replay_sample);

}  // namespace

BENCHMARK_MAIN();
