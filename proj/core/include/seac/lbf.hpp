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

#include <cstdlib>
#include <span>
#include <vector>

#include "seac/env.hpp"
#include "seac/rng.hpp"

namespace seac::envs {

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

inline bool adjacent4(Cell a, Cell b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1;
}

enum LbfAction : int { kNorth = 0, kSouth = 1, kWest = 2, kEast = 3, kLoad = 4 };
inline constexpr int kLbfActions = 5;

struct LbfAgent {
  Cell pos;
  int level = 1;
};

struct LbfFood {
  Cell pos;
  int level = 1;
  bool collected = false;
};

struct LbfState {
  int rows = 0;
  int cols = 0;
  std::vector<LbfAgent> agents;
  std::vector<LbfFood> foods;
  int step = 0;
  /// Sum of the levels of every food spawned this episode.
  int food_level_total = 0;

  bool all_collected() const;
  bool occupied(Cell c) const;
};

/// Collects every food whose loading coalition reaches its level and returns
/// per-agent rewards food_level * agent_level / (food_level_total *
/// coalition_level). A loading agent adjacent to several foods targets the
/// highest-level one its neighbourhood of loaders could collect (falling back
/// to the highest-level adjacent food; ties go to the lower food index).
std::vector<double> lbf_resolve_loads(LbfState& state, std::span<const int> loading_agents);

/// Level-based foraging. Observation of agent i (length 3 * (foods + agents)):
/// for each food in index order (row, col, level) scaled by (rows-1, cols-1,
/// max food level), collected foods as (-1, -1, 0); then agent i followed by the
/// remaining agents in index order as (row, col, level) scaled by (rows-1,
/// cols-1, max agent level).
class LbfEnv final : public Environment {
 public:
  explicit LbfEnv(EnvSpec spec);

  std::vector<Observation> reset(std::uint64_t seed) override;
  std::vector<Observation> reset() override;
  StepResult step(std::span<const int> actions) override;

  int n_agents() const override { return spec_.n_agents; }
  int obs_dim() const override { return 3 * (spec_.n_food + spec_.n_agents); }
  int n_actions() const override { return kLbfActions; }

  std::string render_text() const override;
  std::string render_svg() const override;

  const LbfState& state() const { return state_; }
  /// Replaces the simulator state (tests, replays).
  void set_state(LbfState state) { state_ = std::move(state); }
  std::vector<Observation> observations() const;
  int max_food_level() const;

 private:
  Observation observe(int agent) const;

  Rng rng_;
  LbfState state_;
};

}  // namespace seac::envs
