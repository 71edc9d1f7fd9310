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

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "seac/plot.hpp"

namespace seac::plot {
namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::filesystem::path write_run(const std::filesystem::path& dir, const std::string& name, double scale) {
  const auto p = dir / name;
  std::ofstream out(p);
  out << "# metrics-schema: 1\nstep,updates,episodes,return_sum,q_loss\n";
  for (int k = 1; k <= 5; ++k) out << k * 100 << ',' << k << ',' << k << ',' << scale * k << ",nan\n";
  return p;
}

TEST(Plot, AggregateMeanAndPopulationStd) {
  const auto dir = testing::scratch_dir("plot_agg");
  std::vector<MetricsTable> runs;
  for (double s : {1.0, 2.0, 3.0}) runs.push_back(read_metrics(write_run(dir, std::to_string(s) + ".csv", s)));
  const Curve c = aggregate(runs, "return_sum");
  ASSERT_EQ(c.step.size(), 5u);
  EXPECT_EQ(c.step[0], 100.0);
  EXPECT_DOUBLE_EQ(c.mean[1], 4.0);
  EXPECT_NEAR(c.std[1], 2.0 * std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_TRUE(std::isnan(runs[0].column("q_loss")[0]));
}

TEST(Plot, ThreeSeedsOneGroupPerMetric) {
  const auto dir = testing::scratch_dir("plot_svg");
  RunGroup g{"seac", {}};
  for (double s : {1.0, 2.0, 3.0}) g.metrics_files.push_back(write_run(dir, std::to_string(s) + ".csv", s));
  const auto written = plot_groups({g}, dir / "out");
  // Bookkeeping columns and all-nan columns are skipped.
  ASSERT_EQ(written.size(), 1u);
  EXPECT_EQ(written[0].filename(), "return_sum.svg");
  const std::string svg = testing::read_file(written[0]);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(count(svg, "<polygon class=\"std\""), 1u);
  EXPECT_EQ(count(svg, "<polyline class=\"mean\""), 1u);
  EXPECT_EQ(count(svg, "class=\"legend\""), 1u);
}

TEST(Plot, TwoGroupsTwoBands) {
  const auto dir = testing::scratch_dir("plot_two");
  RunGroup a{"iac", {write_run(dir, "a1.csv", 1.0), write_run(dir, "a2.csv", 1.5)}};
  RunGroup b{"seac", {write_run(dir, "b1.csv", 2.0)}};
  const auto written = plot_groups({a, b}, dir / "out", {"return_sum"});
  const std::string svg = testing::read_file(written.at(0));
  EXPECT_EQ(count(svg, "<polygon class=\"std\""), 2u);
  EXPECT_EQ(count(svg, "<polyline class=\"mean\""), 2u);
}

TEST(Plot, MissingMetricThrows) {
  const auto dir = testing::scratch_dir("plot_missing");
  RunGroup g{"x", {write_run(dir, "a.csv", 1.0)}};
  EXPECT_THROW(plot_groups({g}, dir / "out", {"no_such_metric"}), std::exception);
  EXPECT_THROW(read_metrics(dir / "absent.csv"), std::exception);
}

}  // namespace
}  // namespace seac::plot
