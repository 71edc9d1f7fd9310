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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "seac/config.hpp"

namespace seac {
namespace {

TEST(Config, DefaultsMatchHyperparameterTable) {
  const TrainConfig c;
  EXPECT_EQ(c.lambda, 1.0);
  EXPECT_EQ(c.gamma, 0.99);
  EXPECT_EQ(c.lr, 3e-4);
  EXPECT_EQ(c.adam_eps, 1e-3);
  EXPECT_EQ(c.entropy_coef, 0.01);
  EXPECT_EQ(c.value_coef, 0.5);
  EXPECT_EQ(c.grad_clip, 0.5);
  EXPECT_EQ(c.n_steps, 5);
  EXPECT_EQ(c.n_parallel, 4);
  EXPECT_EQ(c.return_window, 100);
  EXPECT_EQ(c.eval_episodes, 100);
  EXPECT_TRUE(c.bootstrap_truncation);
}

TEST(Config, IniRoundTripIsCanonical) {
  TrainConfig c;
  c.env = envs::preset("rware-tiny-4ag-hard");
  c.algorithm = Algorithm::kSnac;
  c.seed = 99;
  c.lambda = 0.1 + 0.2;
  c.q.batch_size = 32;
  const std::string text = c.to_ini();
  const TrainConfig back = TrainConfig::from_ini(text);
  EXPECT_EQ(back.to_ini(), text);
  EXPECT_EQ(back.hash(), c.hash());
  EXPECT_EQ(back.lambda, c.lambda);
  EXPECT_EQ(back.env.n_requests, 2);
}

TEST(Config, PresetThenOverrides) {
  const auto c = TrainConfig::from_ini(
      "[run]\nalgorithm = iac\ntotal_steps = 2e6\n[env]\npreset = lbf-12x12-2p-1f\nmax_episode_steps = 50\n"
      "[actor_critic]\nlambda = 0\n");
  EXPECT_EQ(c.algorithm, Algorithm::kIac);
  EXPECT_EQ(c.total_steps, 2000000u);
  EXPECT_EQ(c.env.rows, 12);
  EXPECT_EQ(c.env.max_episode_steps, 50);
  EXPECT_EQ(c.lambda, 0.0);
}

TEST(Config, HashChangesWithAnyField) {
  TrainConfig a;
  TrainConfig b;
  b.entropy_coef = 0.02;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Config, Errors) {
  EXPECT_THROW(TrainConfig::from_ini("[run]\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(TrainConfig::from_ini("[nowhere]\nx = 1\n"), ConfigError);
  EXPECT_THROW(TrainConfig::from_ini("[run]\nalgorithm = ppo\n"), ConfigError);
  EXPECT_THROW(TrainConfig::from_ini("[actor_critic]\nlr = fast\n"), ConfigError);
  EXPECT_THROW(TrainConfig::from_ini("[actor_critic]\nlr = -1\n"), ConfigError);
  EXPECT_THROW(TrainConfig::from_ini("[env]\npreset = chess\n"), ConfigError);
  EXPECT_THROW(TrainConfig::from_ini("[run]\nseed = -3\n"), ConfigError);
  EXPECT_THROW(TrainConfig::load("/nonexistent/file.ini"), ConfigError);
}

TEST(Config, ShippedConfigsParse) {
  const std::filesystem::path dir = SEAC_SOURCE_DIR "/configs";
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".ini") continue;
    ++n;
    const auto c = TrainConfig::load(e.path());
    EXPECT_EQ(c.algorithm, Algorithm::kSeac) << e.path();
    EXPECT_EQ(c.env.describe().substr(0, 3), e.path().stem().string().substr(0, 3));
  }
  EXPECT_EQ(n, 8);
}

}  // namespace
}  // namespace seac
