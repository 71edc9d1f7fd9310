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

#include <span>
#include <utility>
#include <vector>

#include "seac/env.hpp"
#include "seac/lbf.hpp"
#include "seac/rng.hpp"

namespace seac::envs {

enum RwareAction : int { kTurnLeft = 0, kTurnRight = 1, kForward = 2, kToggleLoad = 3 };
inline constexpr int kRwareActions = 4;

enum class Heading : int { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };

/// (rows, cols) of a size preset: tiny 11 x 10, small 20 x 10.
std::pair<int, int> rware_grid_dims(RwareSize size);

/// Static warehouse floor: rack cells hold shelves, everything else is
/// corridor. Shelf columns are two cells wide with one-cell corridors between
/// them, a corridor row every nine rows, and two goal cells in the middle of the
/// bottom row with a clear approach column above them.
struct RwareLayout {
  int rows = 0;
  int cols = 0;
  std::vector<char> corridor;  // row-major
  std::vector<Cell> goals;

  static RwareLayout make(RwareSize size);
  bool is_corridor(Cell c) const { return corridor[c.row * cols + c.col] != 0; }
  bool is_goal(Cell c) const;
  bool in_bounds(Cell c) const { return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols; }
};

struct RwareAgent {
  Cell pos;
  Heading heading = Heading::kNorth;
  int carrying = -1;  // shelf id or -1
};

struct RwareShelf {
  Cell pos;
};

struct RwareState {
  std::vector<RwareAgent> agents;
  std::vector<RwareShelf> shelves;
  std::vector<int> requests;  // shelf ids, always n_requests long
  int step = 0;

  bool shelf_carried(int shelf) const;
  /// Shelf resting (not carried) on `c`, or -1.
  int stored_shelf_at(Cell c) const;
  int agent_at(Cell c) const;
  bool requested(int shelf) const;
};

/// Multi-robot warehouse. Observation of each agent (length 71):
///   [0..1] own (row, col) scaled by (rows-1, cols-1)
///   [2]    carrying flag
///   [3..6] own heading one-hot (N, E, S, W)
///   [7]    standing on a corridor cell
///   then the 3x3 window around the agent in row-major order, each cell as
///   [agent present, agent heading one-hot (4), shelf present, shelf requested];
///   cells outside the grid are all zeros.
class RwareEnv final : public Environment {
 public:
  static constexpr int kObsDim = 8 + 9 * 7;

  explicit RwareEnv(EnvSpec spec);

  std::vector<Observation> reset(std::uint64_t seed) override;
  std::vector<Observation> reset() override;
  StepResult step(std::span<const int> actions) override;

  int n_agents() const override { return spec_.n_agents; }
  int obs_dim() const override { return kObsDim; }
  int n_actions() const override { return kRwareActions; }

  std::string render_text() const override;
  std::string render_svg() const override;

  const RwareLayout& layout() const { return layout_; }
  const RwareState& state() const { return state_; }
  void set_state(RwareState state) { state_ = std::move(state); }
  std::vector<Observation> observations() const;

 private:
  Observation observe(int agent) const;
  int sample_unrequested_shelf();

  RwareLayout layout_;
  Rng rng_;
  RwareState state_;
};

}  // namespace seac::envs
