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
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seac::envs {

using Observation = std::vector<double>;

enum class EnvKind { kLbf, kRware, kSymGame };
enum class RwareSize { kTiny, kSmall };

std::string_view to_string(EnvKind kind);
EnvKind parse_env_kind(std::string_view text);
std::string_view to_string(RwareSize size);
RwareSize parse_rware_size(std::string_view text);

/// Static description of one environment instance.
struct EnvSpec {
  EnvKind kind = EnvKind::kLbf;
  int n_agents = 2;
  // Grid size; derived from the preset for RWARE.
  int rows = 8;
  int cols = 8;
  int max_episode_steps = 25;

  // Level-based foraging.
  int n_food = 1;
  bool cooperative = false;
  int max_agent_level = 3;

  // Warehouse.
  RwareSize rware_size = RwareSize::kTiny;
  int n_requests = 2;

  /// Throws std::invalid_argument on non-positive counts or dimensions.
  void validate() const;
  std::string describe() const;
};

/// Named experiment presets, e.g. "lbf-8x8-2p-2f-coop" or "rware-tiny-2ag-hard".
EnvSpec preset(std::string_view name);
std::vector<std::string> preset_names();

class InfeasibleSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StepInfo {
  /// Episode ended only because the step limit was reached.
  bool truncated = false;
  int episode_step = 0;
  /// Foods collected (LBF) or shelves delivered (RWARE) during this step.
  int events = 0;
};

struct StepResult {
  std::vector<Observation> observations;
  std::vector<double> rewards;
  bool done = false;
  StepInfo info;
};

/// Markov-game interface shared by every simulator.
class Environment {
 public:
  virtual ~Environment() = default;

  /// Reseeds the environment and starts a fresh episode.
  virtual std::vector<Observation> reset(std::uint64_t seed) = 0;
  /// Starts a fresh episode continuing the current random stream.
  virtual std::vector<Observation> reset() = 0;
  /// Advances one tick. Throws std::out_of_range on an invalid action.
  virtual StepResult step(std::span<const int> actions) = 0;

  virtual int n_agents() const = 0;
  virtual int obs_dim() const = 0;
  virtual int n_actions() const = 0;

  virtual std::string render_text() const = 0;
  virtual std::string render_svg() const = 0;

  const EnvSpec& spec() const { return spec_; }

 protected:
  explicit Environment(EnvSpec spec) : spec_(std::move(spec)) {}
  void check_actions(std::span<const int> actions) const;

  EnvSpec spec_;
};

std::unique_ptr<Environment> make_env(const EnvSpec& spec);

}  // namespace seac::envs
