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

#include <fmt/format.h>
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "seac/config.hpp"
#include "seac/trainer.hpp"
#include "seac_tools/cli.hpp"

namespace seac::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "seac");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path write_config(const std::filesystem::path& dir, const std::string& algo) {
  const auto p = dir / (algo + ".ini");
  std::ofstream(p) << "[run]\nalgorithm = " << algo
                   << "\ntotal_steps = 2000\nlog_interval = 500\n[env]\npreset = lbf-8x8-2p-2f-coop\n";
  return p;
}

TEST(Cli, HelpListsSubcommandsAndExitCodes) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, kOk);
  for (const char* s : {"train", "evaluate", "verify", "plot", "Exit codes"}) {
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
  }
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kUsageError);
  EXPECT_EQ(run({"dance"}).code, kUsageError);
  EXPECT_EQ(run({"train"}).code, kUsageError);
  EXPECT_EQ(run({"verify", "--random-games", "-1"}).code, kUsageError);
}

TEST(Cli, BadConfigExitsTwo) {
  const auto dir = testing::scratch_dir("cli_bad");
  std::ofstream(dir / "bad.ini") << "[run]\nalgorithm = nope\n";
  const auto r = run({"train", "-c", (dir / "bad.ini").string(), "-o", (dir / "run").string()});
  EXPECT_EQ(r.code, kUsageError);
  EXPECT_NE(r.err.find("nope"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(dir / "run"));
  EXPECT_EQ(run({"train", "-c", (dir / "missing.ini").string()}).code, kUsageError);
}

TEST(Cli, VerifyPasses) {
  const auto r = run({"verify", "--random-games", "5", "--mc-samples", "10000"});
  EXPECT_EQ(r.code, kOk) << r.out;
  EXPECT_NE(r.out.find("all checks passed"), std::string::npos);
}

TEST(Cli, LambdaZeroTrainMatchesIac) {
  const auto dir = testing::scratch_dir("cli_lambda");
  const auto cfg = write_config(dir, "seac");
  ASSERT_EQ(run({"train", "-q", "-c", cfg.string(), "--lambda", "0", "-o", (dir / "a").string()}).code, kOk);
  ASSERT_EQ(run({"train", "-q", "-c", cfg.string(), "--algorithm", "iac", "-o", (dir / "b").string()}).code, kOk);
  EXPECT_EQ(testing::read_file(dir / "a/metrics.csv"), testing::read_file(dir / "b/metrics.csv"));
}

TEST(Cli, ThinShellOverLibrary) {
  const auto dir = testing::scratch_dir("cli_thin");
  const auto cfg = write_config(dir, "iac");
  ASSERT_EQ(run({"train", "-q", "-c", cfg.string(), "-s", "3", "-o", (dir / "cli").string()}).code, kOk);
  auto c = TrainConfig::load(cfg);
  c.seed = 3;
  train(c, dir / "lib");
  EXPECT_EQ(testing::read_file(dir / "cli/metrics.csv"), testing::read_file(dir / "lib/metrics.csv"));

  const auto e = run({"evaluate", "-r", (dir / "cli").string(), "-n", "5", "-s", "1"});
  EXPECT_EQ(e.code, kOk) << e.err;
  const auto lib = evaluate(c, load_checkpoint(latest_checkpoint(dir / "lib")), 5, 1);
  EXPECT_NE(e.out.find(fmt::format("{:.4f} ± {:.4f}", lib.sum_mean, lib.sum_std)), std::string::npos) << e.out;
}

TEST(Cli, PlotGroups) {
  const auto dir = testing::scratch_dir("cli_plot");
  const auto cfg = write_config(dir, "iac");
  std::string runs;
  for (int s = 0; s < 3; ++s) {
    const auto out = dir / ("s" + std::to_string(s));
    ASSERT_EQ(run({"train", "-q", "-c", cfg.string(), "-s", std::to_string(s), "-o", out.string()}).code, kOk);
    runs += (runs.empty() ? "" : ",") + out.string();
  }
  const auto r = run({"plot", "-g", "iac=" + runs, "-m", "return_sum", "-m", "entropy", "-o", (dir / "svg").string()});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "svg/return_sum.svg"));
  EXPECT_TRUE(std::filesystem::exists(dir / "svg/entropy.svg"));
  EXPECT_EQ(run({"plot", "-g", "broken"}).code, kUsageError);
}

}  // namespace
}  // namespace seac::cli
