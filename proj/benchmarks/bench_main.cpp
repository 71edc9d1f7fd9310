// Copyright 2026 The seac-cpp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "fixtures.hpp"
#include "seac/algorithms.hpp"
#include "seac/env.hpp"
#include "seac/optim.hpp"

namespace {

using namespace seac;

// Forward pass of a 64x64 tanh policy over a 20-row batch.
void BM_MlpPredict(benchmark::State& state) {
  Rng rng(1);
  const int rows = static_cast<int>(state.range(0));
  nn::Mlp net = nn::Mlp::orthogonal("phi", {30, 64, 64, 5}, 0.01, rng);
  const ad::Matrix x = testing::random_matrix(rng, rows, 30);
  for (auto _ : state) benchmark::DoNotOptimize(net.predict(x));
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_MlpPredict)->Arg(4)->Arg(20)->Arg(64);

// Tape forward plus backpropagation of a scalar loss.
void BM_MlpBackward(benchmark::State& state) {
  Rng rng(2);
  const int rows = static_cast<int>(state.range(0));
  nn::Mlp net = nn::Mlp::orthogonal("phi", {30, 64, 64, 5}, 0.01, rng);
  const ad::Matrix x = testing::random_matrix(rng, rows, 30);
  const auto params = net.parameters();
  for (auto _ : state) {
    ad::zero_grad(params);
    ad::Tape tape;
    tape.backpropagate(tape.mean(net.forward(tape, tape.constant(x))));
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_MlpBackward)->Arg(20)->Arg(64);

// One full SEAC update for agent 0: loss, backward, clip and Adam.
void BM_SeacUpdate(benchmark::State& state) {
  const int n_agents = static_cast<int>(state.range(0));
  Rng rng(3);
  auto agents = testing::make_agents(4, n_agents, 30, 5);
  const algo::RolloutBatch batch = testing::random_batch(rng, agents, 4, 5);
  std::vector<nn::AgentParams*> ptrs;
  for (auto& a : agents) ptrs.push_back(&a);
  algo::ActorCriticConfig cfg;
  auto params = agents[0].phi.parameters();
  for (auto* p : agents[0].theta.parameters()) params.push_back(p);
  ad::AdamState adam = ad::AdamState::for_params(params);
  for (auto _ : state) {
    ad::zero_grad(params);
    benchmark::DoNotOptimize(algo::seac_loss(ptrs, 0, batch, cfg));
    ad::clip_grad_norm(params, 0.5);
    ad::adam_update(params, adam);
  }
}
BENCHMARK(BM_SeacUpdate)->Arg(2)->Arg(4);

void BM_EnvStep(benchmark::State& state, const char* preset) {
  auto env = envs::make_env(envs::preset(preset));
  env->reset(5);
  Rng rng(6);
  std::vector<int> acts(env->n_agents());
  for (auto _ : state) {
    for (int& a : acts) a = static_cast<int>(uniform_below(rng, env->n_actions()));
    if (env->step(acts).done) env->reset();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_EnvStep, lbf_8x8_coop, "lbf-8x8-2p-2f-coop");
BENCHMARK_CAPTURE(BM_EnvStep, lbf_15x15, "lbf-15x15-3p-4f");
BENCHMARK_CAPTURE(BM_EnvStep, rware_tiny_4ag, "rware-tiny-4ag");
BENCHMARK_CAPTURE(BM_EnvStep, rware_small_4ag, "rware-small-4ag");

}  // namespace

BENCHMARK_MAIN();
