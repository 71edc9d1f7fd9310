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

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "seac/checkpoint.hpp"
#include "seac/trace.hpp"
#include "seac/trainer.hpp"

namespace seac {
namespace {

using testing::read_file;
using testing::scratch_dir;

TrainConfig small_config(Algorithm algo, std::uint64_t steps = 4000) {
  TrainConfig c;
  c.env = envs::preset("lbf-8x8-2p-2f-coop");
  c.algorithm = algo;
  c.total_steps = steps;
  c.log_interval = 1000;
  c.checkpoint_interval = 2000;
  c.q.warmup = 200;
  c.q.buffer_capacity = 1000;
  c.q.target_sync = 20;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

TEST(Metrics, HeaderIsStable) {
  EXPECT_EQ(metrics_header(2),
            "step,updates,episodes,return_sum,return_agent_0,return_agent_1,policy_loss,value_loss,entropy,"
            "grad_norm,is_mean,is_median,is_p05,is_p95,is_in_band,q_loss,q_abs_max,epsilon");
  MetricsRow r;
  r.step = 10;
  r.return_agent = {0.5, NAN};
  r.q_loss = NAN;
  const std::string line = format_metrics_row(r);
  EXPECT_EQ(line.substr(0, 3), "10,");
  EXPECT_NE(line.find("nan"), std::string::npos);
}

TEST(Train, WritesRunDirectory) {
  const auto dir = scratch_dir("layout");
  auto c = small_config(Algorithm::kSeac);
  c.trace_episodes = 2;
  c.eval_interval = 2000;
  c.eval_episodes = 3;
  const auto r = train(c, dir);
  EXPECT_EQ(r.steps, 4000u);
  EXPECT_EQ(r.updates, 4000u / 20);
  for (const char* f : {"config.ini", "metrics.csv", "timing.csv", "summary.json", "importance_weights.csv",
                        "eval.csv", "traces/env0.jsonl", "checkpoints/step_2000", "checkpoints/step_4000"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  EXPECT_EQ(TrainConfig::load(dir / "config.ini").to_ini(), c.to_ini());
  const auto m = lines(read_file(dir / "metrics.csv"));
  ASSERT_EQ(m.size(), 2u + 4u);
  EXPECT_EQ(m[0], "# metrics-schema: 1");
  EXPECT_EQ(m[1], metrics_header(2));
  std::uint64_t prev = 0;
  for (std::size_t k = 2; k < m.size(); ++k) {
    const std::uint64_t step = std::stoull(m[k]);
    EXPECT_GT(step, prev);
    prev = step;
  }
  const auto summary = nlohmann::json::parse(read_file(dir / "summary.json"));
  EXPECT_EQ(summary["steps"], 4000);
  EXPECT_EQ(latest_checkpoint(dir).filename(), "step_4000");
}

TEST(Train, Reproducible) {
  const auto a = scratch_dir("repro_a");
  const auto b = scratch_dir("repro_b");
  for (Algorithm algo : {Algorithm::kSeac, Algorithm::kSeql}) {
    const auto c = small_config(algo, 3000);
    train(c, a);
    train(c, b);
    EXPECT_EQ(read_file(a / "metrics.csv"), read_file(b / "metrics.csv"));
    EXPECT_EQ(read_file(a / "checkpoints/step_3000"), read_file(b / "checkpoints/step_3000"));
  }
}

TEST(Train, SeedChangesOutcome) {
  const auto a = scratch_dir("seed_a");
  const auto b = scratch_dir("seed_b");
  auto c = small_config(Algorithm::kIac, 2000);
  train(c, a);
  c.seed = 1;
  train(c, b);
  EXPECT_NE(read_file(a / "metrics.csv"), read_file(b / "metrics.csv"));
}

TEST(Train, LambdaZeroEqualsIac) {
  const auto a = scratch_dir("lz_seac");
  const auto b = scratch_dir("lz_iac");
  auto c = small_config(Algorithm::kSeac, 6000);
  c.lambda = 0.0;
  train(c, a);
  c.algorithm = Algorithm::kIac;
  train(c, b);
  EXPECT_EQ(read_file(a / "metrics.csv"), read_file(b / "metrics.csv"));
}

TEST(Train, CheckpointRoundTrip) {
  const auto dir = scratch_dir("ckpt");
  for (Algorithm algo : {Algorithm::kSeac, Algorithm::kSnac, Algorithm::kIql}) {
    train(small_config(algo, 2000), dir);
    const std::string bytes = read_file(dir / "checkpoints/step_2000");
    EXPECT_EQ(encode_checkpoint(decode_checkpoint(bytes)), bytes);
  }
}

TEST(Train, ReturnMatchesTraceRewards) {
  const auto dir = scratch_dir("trace");
  auto c = small_config(Algorithm::kSeac, 3000);
  c.env = envs::preset("lbf-12x12-2p-1f");
  c.trace_episodes = 1000;
  c.n_parallel = 1;
  c.return_window = 100000;
  const auto r = train(c, dir);
  const auto trace = envs::read_trace((dir / "traces/env0.jsonl").string());
  double total = 0.0;
  std::uint64_t episodes = 0;
  for (const auto& rec : trace) {
    for (double x : rec.rewards) total += x;
    if (rec.done) ++episodes;
  }
  ASSERT_EQ(episodes, r.episodes);
  ASSERT_GT(episodes, 0u);
  // Only completed episodes count towards the reported return.
  double partial = 0.0;
  for (auto it = trace.rbegin(); it != trace.rend() && !it->done; ++it) {
    for (double x : it->rewards) partial += x;
  }
  EXPECT_NEAR(r.final_return_sum, (total - partial) / static_cast<double>(episodes), 1e-12);
}

TEST(Train, QLearningSampleAccounting) {
  const auto a = scratch_dir("seql");
  const auto b = scratch_dir("iql");
  auto c = small_config(Algorithm::kSeql, 3000);
  c.q.batch_size = 64;
  const auto rs = train(c, a);
  c.algorithm = Algorithm::kIql;
  const auto ri = train(c, b);
  ASSERT_EQ(rs.buffer_draws.size(), 2u);
  EXPECT_EQ(rs.buffer_draws[0], rs.buffer_draws[1]);
  EXPECT_EQ(rs.samples_consumed, ri.samples_consumed);
  EXPECT_EQ(rs.buffer_draws[0] + rs.buffer_draws[1], rs.samples_consumed / 2);
  EXPECT_EQ(ri.buffer_draws[0] + ri.buffer_draws[1], ri.samples_consumed);
  EXPECT_GT(rs.samples_consumed, 0u);
}

TEST(Train, InvalidConfigRejectedBeforeWork) {
  const auto dir = scratch_dir("bad");
  auto c = small_config(Algorithm::kSeac);
  c.lr = -1.0;
  EXPECT_THROW(train(c, dir / "run"), ConfigError);
  EXPECT_FALSE(std::filesystem::exists(dir / "run" / "metrics.csv"));
}

TEST(Train, DivergenceDumpsBatch) {
  const auto dir = scratch_dir("diverge");
  auto c = small_config(Algorithm::kSeac, 4000);
  c.lr = 1e300;
  c.grad_clip = 1e300;
  try {
    train(c, dir);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_TRUE(std::filesystem::exists(e.dump_path));
    const auto dump = nlohmann::json::parse(read_file(e.dump_path));
    EXPECT_TRUE(dump.contains("agents"));
  }
}

TEST(Evaluate, UntrainedWithinBounds) {
  TrainConfig c;
  c.env = envs::preset("lbf-12x12-2p-1f");
  const auto r = evaluate_untrained(c, 50, 3);
  EXPECT_EQ(r.episodes, 50);
  EXPECT_GE(r.sum_mean, 0.0);
  EXPECT_LE(r.sum_mean, 1.0);
  const auto again = evaluate_untrained(c, 50, 3);
  EXPECT_EQ(again.sum_mean, r.sum_mean);
  EXPECT_EQ(again.sum_std, r.sum_std);
}

TEST(Evaluate, CheckpointMustFitEnv) {
  const auto dir = scratch_dir("evalfit");
  const auto c = small_config(Algorithm::kSeac, 1000);
  train(c, dir);
  const auto ck = load_checkpoint(latest_checkpoint(dir));
  EXPECT_NO_THROW(evaluate(c, ck, 2, 0));
  auto other = c;
  other.env = envs::preset("lbf-10x10-3p-3f");
  EXPECT_THROW(evaluate(other, ck, 2, 0), CheckpointError);
}

}  // namespace
}  // namespace seac
