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

#include "seac/rware.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace seac::envs {

namespace {

constexpr int kColumnHeight = 8;
constexpr int kShelfColumns = 3;

Cell ahead(Cell c, Heading h) {
  switch (h) {
    case Heading::kNorth: return {c.row - 1, c.col};
    case Heading::kEast: return {c.row, c.col + 1};
    case Heading::kSouth: return {c.row + 1, c.col};
    case Heading::kWest: return {c.row, c.col - 1};
  }
  return c;
}

Heading turn(Heading h, int delta) { return static_cast<Heading>((static_cast<int>(h) + delta + 4) % 4); }

}  // namespace

std::pair<int, int> rware_grid_dims(RwareSize size) {
  const int shelf_rows = size == RwareSize::kTiny ? 1 : 2;
  return {(kColumnHeight + 1) * shelf_rows + 2, 3 * kShelfColumns + 1};
}

RwareLayout RwareLayout::make(RwareSize size) {
  RwareLayout l;
  std::tie(l.rows, l.cols) = rware_grid_dims(size);
  l.corridor.assign(static_cast<std::size_t>(l.rows) * l.cols, 0);
  const int mid = l.cols / 2;
  for (int r = 0; r < l.rows; ++r) {
    for (int c = 0; c < l.cols; ++c) {
      const bool lane = c % 3 == 0 || r % (kColumnHeight + 1) == 0 || r == l.rows - 1;
      const bool approach = r > l.rows - (kColumnHeight + 3) && (c == mid - 1 || c == mid);
      l.corridor[r * l.cols + c] = (lane || approach) ? 1 : 0;
    }
  }
  l.goals = {{l.rows - 1, mid - 1}, {l.rows - 1, mid}};
  return l;
}

bool RwareLayout::is_goal(Cell c) const {
  return std::find(goals.begin(), goals.end(), c) != goals.end();
}

bool RwareState::shelf_carried(int shelf) const {
  return std::any_of(agents.begin(), agents.end(),
                     [&](const RwareAgent& a) { return a.carrying == shelf; });
}

int RwareState::stored_shelf_at(Cell c) const {
  for (std::size_t s = 0; s < shelves.size(); ++s) {
    if (shelves[s].pos == c && !shelf_carried(static_cast<int>(s))) return static_cast<int>(s);
  }
  return -1;
}

int RwareState::agent_at(Cell c) const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].pos == c) return static_cast<int>(i);
  }
  return -1;
}

bool RwareState::requested(int shelf) const {
  return std::find(requests.begin(), requests.end(), shelf) != requests.end();
}

RwareEnv::RwareEnv(EnvSpec spec) : Environment(std::move(spec)) {
  spec_.validate();
  if (spec_.kind != EnvKind::kRware) throw std::invalid_argument("RwareEnv: spec is not rware");
  layout_ = RwareLayout::make(spec_.rware_size);
  spec_.rows = layout_.rows;
  spec_.cols = layout_.cols;
  const int racks = static_cast<int>(std::count(layout_.corridor.begin(), layout_.corridor.end(), 0));
  if (spec_.n_agents > layout_.rows * layout_.cols) {
    throw InfeasibleSpec(fmt::format("rware: {} agents do not fit a {}x{} floor", spec_.n_agents,
                                     layout_.rows, layout_.cols));
  }
  if (spec_.n_requests > racks) {
    throw InfeasibleSpec(
        fmt::format("rware: {} requests exceed the {} shelves", spec_.n_requests, racks));
  }
}

std::vector<Observation> RwareEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  return reset();
}

std::vector<Observation> RwareEnv::reset() {
  RwareState s;
  for (int r = 0; r < layout_.rows; ++r) {
    for (int c = 0; c < layout_.cols; ++c) {
      if (!layout_.is_corridor({r, c})) s.shelves.push_back({{r, c}});
    }
  }
  // Partial Fisher-Yates over cell indices for distinct start cells.
  std::vector<int> cells(static_cast<std::size_t>(layout_.rows) * layout_.cols);
  for (std::size_t k = 0; k < cells.size(); ++k) cells[k] = static_cast<int>(k);
  s.agents.resize(spec_.n_agents);
  for (int i = 0; i < spec_.n_agents; ++i) {
    const std::size_t j = i + uniform_below(rng_, cells.size() - i);
    std::swap(cells[i], cells[j]);
    s.agents[i].pos = {cells[i] / layout_.cols, cells[i] % layout_.cols};
    s.agents[i].heading = static_cast<Heading>(uniform_below(rng_, 4));
  }
  std::vector<int> ids(s.shelves.size());
  for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = static_cast<int>(k);
  for (int k = 0; k < spec_.n_requests; ++k) {
    const std::size_t j = k + uniform_below(rng_, ids.size() - k);
    std::swap(ids[k], ids[j]);
    s.requests.push_back(ids[k]);
  }
  state_ = std::move(s);
  return observations();
}

int RwareEnv::sample_unrequested_shelf() {
  std::vector<int> pool;
  for (int s = 0; s < static_cast<int>(state_.shelves.size()); ++s) {
    if (!state_.requested(s)) pool.push_back(s);
  }
  return pool[uniform_below(rng_, pool.size())];
}

StepResult RwareEnv::step(std::span<const int> actions) {
  check_actions(actions);
  const int n = spec_.n_agents;

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_below(rng_, i)]);

  for (int i : order) {
    RwareAgent& a = state_.agents[i];
    switch (actions[i]) {
      case kTurnLeft: a.heading = turn(a.heading, -1); break;
      case kTurnRight: a.heading = turn(a.heading, 1); break;
      case kForward: {
        const Cell t = ahead(a.pos, a.heading);
        if (!layout_.in_bounds(t) || state_.agent_at(t) >= 0) break;
        if (a.carrying >= 0 && state_.stored_shelf_at(t) >= 0) break;
        a.pos = t;
        if (a.carrying >= 0) state_.shelves[a.carrying].pos = t;
        break;
      }
      case kToggleLoad: {
        if (a.carrying >= 0) {
          if (!layout_.is_corridor(a.pos) && state_.stored_shelf_at(a.pos) < 0) a.carrying = -1;
        } else {
          a.carrying = state_.stored_shelf_at(a.pos);
        }
        break;
      }
      default: break;
    }
  }

  StepResult out;
  out.rewards.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const RwareAgent& a = state_.agents[i];
    if (a.carrying < 0 || !layout_.is_goal(a.pos)) continue;
    auto it = std::find(state_.requests.begin(), state_.requests.end(), a.carrying);
    if (it == state_.requests.end()) continue;
    out.rewards[i] += 1.0;
    ++out.info.events;
    *it = sample_unrequested_shelf();
  }

  ++state_.step;
  out.done = state_.step >= spec_.max_episode_steps;
  out.info.truncated = out.done;
  out.info.episode_step = state_.step;
  out.observations = observations();
  return out;
}

std::vector<Observation> RwareEnv::observations() const {
  std::vector<Observation> out;
  out.reserve(spec_.n_agents);
  for (int i = 0; i < spec_.n_agents; ++i) out.push_back(observe(i));
  return out;
}

Observation RwareEnv::observe(int agent) const {
  Observation o(kObsDim, 0.0);
  const RwareAgent& self = state_.agents[agent];
  o[0] = static_cast<double>(self.pos.row) / std::max(1, layout_.rows - 1);
  o[1] = static_cast<double>(self.pos.col) / std::max(1, layout_.cols - 1);
  o[2] = self.carrying >= 0 ? 1.0 : 0.0;
  o[3 + static_cast<int>(self.heading)] = 1.0;
  o[7] = layout_.is_corridor(self.pos) ? 1.0 : 0.0;
  int k = 8;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc, k += 7) {
      const Cell c{self.pos.row + dr, self.pos.col + dc};
      if (!layout_.in_bounds(c)) continue;
      const int other = state_.agent_at(c);
      if (other >= 0) {
        o[k] = 1.0;
        o[k + 1 + static_cast<int>(state_.agents[other].heading)] = 1.0;
      }
      int shelf = state_.stored_shelf_at(c);
      if (shelf < 0 && other >= 0) shelf = state_.agents[other].carrying;
      if (shelf >= 0) {
        o[k + 5] = 1.0;
        o[k + 6] = state_.requested(shelf) ? 1.0 : 0.0;
      }
    }
  }
  return o;
}

}  // namespace seac::envs
