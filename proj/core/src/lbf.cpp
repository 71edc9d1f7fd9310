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

#include "seac/lbf.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace seac::envs {

namespace {

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = uniform_below(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

Cell moved(Cell c, int action) {
  switch (action) {
    case kNorth: return {c.row - 1, c.col};
    case kSouth: return {c.row + 1, c.col};
    case kWest: return {c.row, c.col - 1};
    case kEast: return {c.row, c.col + 1};
    default: return c;
  }
}

double scaled(int v, int extent) { return static_cast<double>(v) / std::max(1, extent); }

}  // namespace

bool LbfState::all_collected() const {
  return std::all_of(foods.begin(), foods.end(), [](const LbfFood& f) { return f.collected; });
}

bool LbfState::occupied(Cell c) const {
  for (const auto& a : agents) {
    if (a.pos == c) return true;
  }
  for (const auto& f : foods) {
    if (!f.collected && f.pos == c) return true;
  }
  return false;
}

std::vector<double> lbf_resolve_loads(LbfState& state, std::span<const int> loading_agents) {
  const std::size_t n_foods = state.foods.size();
  std::vector<double> rewards(state.agents.size(), 0.0);

  std::vector<int> capacity(n_foods, 0);
  for (std::size_t f = 0; f < n_foods; ++f) {
    if (state.foods[f].collected) continue;
    for (int a : loading_agents) {
      if (adjacent4(state.agents[a].pos, state.foods[f].pos)) capacity[f] += state.agents[a].level;
    }
  }

  std::vector<std::vector<int>> coalition(n_foods);
  for (int a : loading_agents) {
    int best = -1;
    int best_fallback = -1;
    for (std::size_t f = 0; f < n_foods; ++f) {
      const LbfFood& food = state.foods[f];
      if (food.collected || !adjacent4(state.agents[a].pos, food.pos)) continue;
      if (best_fallback < 0 || food.level > state.foods[best_fallback].level) {
        best_fallback = static_cast<int>(f);
      }
      if (capacity[f] >= food.level && (best < 0 || food.level > state.foods[best].level)) {
        best = static_cast<int>(f);
      }
    }
    const int target = best >= 0 ? best : best_fallback;
    if (target >= 0) coalition[target].push_back(a);
  }

  for (std::size_t f = 0; f < n_foods; ++f) {
    if (coalition[f].empty()) continue;
    int coalition_level = 0;
    for (int a : coalition[f]) coalition_level += state.agents[a].level;
    LbfFood& food = state.foods[f];
    if (coalition_level < food.level) continue;
    food.collected = true;
    const double denom = static_cast<double>(state.food_level_total) * coalition_level;
    for (int a : coalition[f]) {
      rewards[a] += static_cast<double>(food.level) * state.agents[a].level / denom;
    }
  }
  return rewards;
}

LbfEnv::LbfEnv(EnvSpec spec) : Environment(std::move(spec)) {
  spec_.validate();
  if (spec_.kind != EnvKind::kLbf) throw std::invalid_argument("LbfEnv: spec is not lbf");
  if (spec_.n_food + spec_.n_agents > spec_.rows * spec_.cols) {
    throw InfeasibleSpec(fmt::format("lbf: {} agents and {} foods do not fit a {}x{} grid",
                                     spec_.n_agents, spec_.n_food, spec_.rows, spec_.cols));
  }
}

int LbfEnv::max_food_level() const {
  return std::min(spec_.n_agents, spec_.cooperative ? spec_.n_agents : 2) * spec_.max_agent_level;
}

std::vector<Observation> LbfEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  return reset();
}

std::vector<Observation> LbfEnv::reset() {
  const int n = spec_.n_agents;
  LbfState s;
  s.rows = spec_.rows;
  s.cols = spec_.cols;
  s.agents.resize(n);
  for (auto& a : s.agents) {
    a.level = 1 + static_cast<int>(uniform_below(rng_, spec_.max_agent_level));
  }

  int food_cap = 0;
  if (spec_.cooperative) {
    for (const auto& a : s.agents) food_cap += a.level;
  } else if (n == 1) {
    food_cap = s.agents[0].level;
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        food_cap = std::max(food_cap, s.agents[i].level + s.agents[j].level);
      }
    }
  }

  // Foods go on interior cells, never in each other's 8-neighbourhood.
  std::vector<Cell> candidates;
  const bool interior = s.rows >= 3 && s.cols >= 3;
  for (int r = interior ? 1 : 0; r < (interior ? s.rows - 1 : s.rows); ++r) {
    for (int c = interior ? 1 : 0; c < (interior ? s.cols - 1 : s.cols); ++c) {
      candidates.push_back({r, c});
    }
  }
  shuffle(candidates, rng_);
  for (const Cell& cell : candidates) {
    if (static_cast<int>(s.foods.size()) == spec_.n_food) break;
    const bool crowded = std::any_of(s.foods.begin(), s.foods.end(), [&](const LbfFood& f) {
      return std::abs(f.pos.row - cell.row) <= 1 && std::abs(f.pos.col - cell.col) <= 1;
    });
    if (crowded) continue;
    LbfFood food;
    food.pos = cell;
    food.level = spec_.cooperative ? food_cap
                                   : 1 + static_cast<int>(uniform_below(rng_, food_cap));
    s.foods.push_back(food);
  }
  if (static_cast<int>(s.foods.size()) < spec_.n_food) {
    throw InfeasibleSpec(fmt::format("lbf: cannot place {} non-adjacent foods on a {}x{} grid",
                                     spec_.n_food, s.rows, s.cols));
  }
  for (const auto& f : s.foods) s.food_level_total += f.level;

  std::vector<Cell> free_cells;
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      const Cell cell{r, c};
      if (std::none_of(s.foods.begin(), s.foods.end(),
                       [&](const LbfFood& f) { return f.pos == cell; })) {
        free_cells.push_back(cell);
      }
    }
  }
  shuffle(free_cells, rng_);
  for (int i = 0; i < n; ++i) s.agents[i].pos = free_cells[i];

  state_ = std::move(s);
  return observations();
}

StepResult LbfEnv::step(std::span<const int> actions) {
  check_actions(actions);
  const int n = spec_.n_agents;

  std::vector<Cell> target(n);
  std::vector<char> moving(n, 0);
  for (int i = 0; i < n; ++i) {
    target[i] = state_.agents[i].pos;
    if (actions[i] == kLoad) continue;
    const Cell t = moved(state_.agents[i].pos, actions[i]);
    if (t.row < 0 || t.row >= state_.rows || t.col < 0 || t.col >= state_.cols) continue;
    if (state_.occupied(t)) continue;
    target[i] = t;
    moving[i] = 1;
  }
  // Simultaneous moves into one cell cancel each other.
  const std::vector<Cell> wanted = target;
  for (int i = 0; i < n; ++i) {
    if (!moving[i]) continue;
    for (int j = 0; j < n; ++j) {
      if (j != i && moving[j] && wanted[j] == wanted[i]) {
        target[i] = state_.agents[i].pos;
        break;
      }
    }
  }
  for (int i = 0; i < n; ++i) state_.agents[i].pos = target[i];

  std::vector<int> loaders;
  for (int i = 0; i < n; ++i) {
    if (actions[i] == kLoad) loaders.push_back(i);
  }
  const int before = static_cast<int>(std::count_if(
      state_.foods.begin(), state_.foods.end(), [](const LbfFood& f) { return f.collected; }));

  StepResult out;
  out.rewards = lbf_resolve_loads(state_, loaders);
  ++state_.step;
  const int after = static_cast<int>(std::count_if(
      state_.foods.begin(), state_.foods.end(), [](const LbfFood& f) { return f.collected; }));
  const bool solved = state_.all_collected();
  out.done = solved || state_.step >= spec_.max_episode_steps;
  out.info.truncated = out.done && !solved;
  out.info.episode_step = state_.step;
  out.info.events = after - before;
  out.observations = observations();
  return out;
}

std::vector<Observation> LbfEnv::observations() const {
  std::vector<Observation> out;
  out.reserve(spec_.n_agents);
  for (int i = 0; i < spec_.n_agents; ++i) out.push_back(observe(i));
  return out;
}

Observation LbfEnv::observe(int agent) const {
  Observation o;
  o.reserve(obs_dim());
  const int food_scale = max_food_level();
  for (const auto& f : state_.foods) {
    if (f.collected) {
      o.insert(o.end(), {-1.0, -1.0, 0.0});
    } else {
      o.push_back(scaled(f.pos.row, state_.rows - 1));
      o.push_back(scaled(f.pos.col, state_.cols - 1));
      o.push_back(scaled(f.level, food_scale));
    }
  }
  auto push_agent = [&](const LbfAgent& a) {
    o.push_back(scaled(a.pos.row, state_.rows - 1));
    o.push_back(scaled(a.pos.col, state_.cols - 1));
    o.push_back(scaled(a.level, spec_.max_agent_level));
  };
  push_agent(state_.agents[agent]);
  for (int j = 0; j < spec_.n_agents; ++j) {
    if (j != agent) push_agent(state_.agents[j]);
  }
  return o;
}

}  // namespace seac::envs
