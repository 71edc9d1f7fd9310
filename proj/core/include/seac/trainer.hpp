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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seac/algorithms.hpp"
#include "seac/checkpoint.hpp"
#include "seac/config.hpp"

namespace seac {

inline constexpr int kMetricsSchemaVersion = 1;

/// Raised when a loss or importance weight goes non-finite. The offending
/// batch has been written to `dump_path` before the throw.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::filesystem::path dump)
      : std::runtime_error(what), dump_path(std::move(dump)) {}
  std::filesystem::path dump_path;
};

/// One line of metrics.csv. NaN marks a value that does not apply to the
/// algorithm or is not yet available.
struct MetricsRow {
  std::uint64_t step = 0;
  std::uint64_t updates = 0;
  std::uint64_t episodes = 0;
  double return_sum = 0.0;
  std::vector<double> return_agent;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double grad_norm = 0.0;
  double is_mean = 0.0;
  double is_median = 0.0;
  double is_p05 = 0.0;
  double is_p95 = 0.0;
  double is_in_band = 0.0;  // fraction within [0.5, 1.5]
  double q_loss = 0.0;
  double q_abs_max = 0.0;
  double epsilon = 0.0;
};

std::string metrics_header(int n_agents);
std::string format_metrics_row(const MetricsRow& row);

struct ImportanceSummary {
  std::uint64_t count = 0;
  double median = 0.0;
  double in_band = 0.0;
};

struct TrainResult {
  std::filesystem::path run_dir;
  std::uint64_t steps = 0;
  std::uint64_t updates = 0;
  std::uint64_t episodes = 0;
  double final_return_sum = 0.0;
  std::vector<double> final_returns;
  /// Weights logged from the last quarter of the step budget.
  ImportanceSummary final_quarter;
  /// Q-learning: tuples drawn from each replay buffer, and tuples used by
  /// gradient updates summed over agents.
  std::vector<std::uint64_t> buffer_draws;
  std::uint64_t samples_consumed = 0;
  /// Q-learning: largest |Q(o, a)| seen on any training batch.
  double max_abs_q = 0.0;
  std::filesystem::path last_checkpoint;
};

struct TrainOptions {
  /// Called after every metrics row is written.
  std::function<void(const MetricsRow&)> on_log;
};

/// Runs the configured algorithm and writes the run directory:
///   config.ini, metrics.csv, timing.csv, summary.json,
///   importance_weights.csv (seac), eval.csv (when eval_interval > 0),
///   checkpoints/step_<n>, traces/env0.jsonl (when trace_episodes > 0).
/// Throws ConfigError on an invalid config and DivergenceError on a
/// non-finite loss.
TrainResult train(const TrainConfig& config, const std::filesystem::path& run_dir, const TrainOptions& options = {});

struct EvalResult {
  int episodes = 0;
  std::vector<double> mean;
  std::vector<double> std;
  double sum_mean = 0.0;
  double sum_std = 0.0;
};

/// Rolls out the checkpointed policies without learning. Actor-critic
/// policies sample stochastically (argmax when `greedy`); Q-learners act
/// epsilon-greedily with the final exploration rate (greedy when `greedy`).
/// Throws CheckpointError when the checkpoint does not fit the config's env.
EvalResult evaluate(const TrainConfig& config, const Checkpoint& checkpoint, int episodes, std::uint64_t seed,
                    bool greedy = false);

/// Same, for freshly initialised parameters of `config`.
EvalResult evaluate_untrained(const TrainConfig& config, int episodes, std::uint64_t seed);

/// Most recent checkpoints/step_<n> of a run directory.
std::filesystem::path latest_checkpoint(const std::filesystem::path& run_dir);

}  // namespace seac
