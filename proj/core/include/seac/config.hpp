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
#include <stdexcept>
#include <string>
#include <string_view>

#include "seac/env.hpp"

namespace seac {

enum class Algorithm { kIac, kSeac, kSnac, kIql, kSeql };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view text);
inline bool is_actor_critic(Algorithm a) {
  return a == Algorithm::kIac || a == Algorithm::kSeac || a == Algorithm::kSnac;
}

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct QConfig {
  std::uint64_t buffer_capacity = 100000;
  int batch_size = 64;
  int target_sync = 200;
  double eps_start = 1.0;
  double eps_end = 0.05;
  double eps_fraction = 0.1;
  /// Tuples every buffer must hold before learning starts.
  std::uint64_t warmup = 1000;
  double grad_clip = 10.0;
  double lr = 3e-4;
};

/// Everything that determines a run. Defaults are the actor-critic
/// hyperparameters used throughout the repository.
struct TrainConfig {
  envs::EnvSpec env = envs::preset("lbf-8x8-2p-2f-coop");
  Algorithm algorithm = Algorithm::kSeac;
  std::uint64_t seed = 0;
  std::uint64_t total_steps = 1000000;

  double lambda = 1.0;
  double gamma = 0.99;
  double lr = 3e-4;
  double adam_eps = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double grad_clip = 0.5;
  double is_clip = 0.0;
  int n_steps = 5;
  int n_parallel = 4;
  bool bootstrap_truncation = true;

  std::uint64_t log_interval = 10000;
  std::uint64_t checkpoint_interval = 0;
  std::uint64_t eval_interval = 0;
  int eval_episodes = 100;
  int return_window = 100;
  int trace_episodes = 0;

  QConfig q;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  /// Canonical INI text; from_ini(to_ini()) reproduces the config.
  std::string to_ini() const;
  /// FNV-1a of to_ini().
  std::uint64_t hash() const;

  /// Parses INI text. Sections [run], [env], [actor_critic], [q_learning];
  /// [env] accepts `preset` followed by field overrides. Unknown sections or
  /// keys are errors.
  static TrainConfig from_ini(const std::string& text);
  static TrainConfig load(const std::filesystem::path& path);
};

}  // namespace seac
