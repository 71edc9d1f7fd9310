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

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seac/env.hpp"
#include "seac/rng.hpp"

namespace seac::envs {

/// Raw tables of a two-agent game. All four-index tables are laid out
/// [s][a1][a2][s'] row-major; `swap` is the role-exchanging state map f.
struct GameTables {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.9;
  std::vector<int> swap;
  std::vector<double> transition;
  std::vector<double> reward1;
  std::vector<double> reward2;

  std::size_t index(int s, int a1, int a2, int next) const {
    return ((static_cast<std::size_t>(s) * n_actions + a1) * n_actions + a2) * n_states + next;
  }
  double p(int s, int a1, int a2, int next) const { return transition[index(s, a1, a2, next)]; }
  double r1(int s, int a1, int a2, int next) const { return reward1[index(s, a1, a2, next)]; }
  double r2(int s, int a1, int a2, int next) const { return reward2[index(s, a1, a2, next)]; }
  std::size_t table_size() const {
    return static_cast<std::size_t>(n_states) * n_actions * n_actions * n_states;
  }
};

class GameConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two-agent game whose tables are invariant under exchanging the agents:
///   R1(f(s), (a2, a1), f(s')) == R2(s, (a1, a2), s')
///   P(s, (a1, a2))(s')        == P(f(s), (a2, a1))(f(s'))
/// compared with exact equality over every entry.
class SymmetricGame {
 public:
  /// Validates shapes, that f is an involution, that transition rows sum to 1
  /// (within 1e-12) and the swap symmetry. Throws GameConstructionError.
  static SymmetricGame create(GameTables tables);
  /// Shape checks only; for negative controls.
  static SymmetricGame create_unchecked(GameTables tables);

  const GameTables& tables() const { return t_; }
  int n_states() const { return t_.n_states; }
  int n_actions() const { return t_.n_actions; }
  int swap(int s) const { return t_.swap[s]; }
  double gamma() const { return t_.gamma; }

  /// First entry breaking the swap symmetry, described in words.
  std::optional<std::string> find_swap_violation() const;

  /// Copy with R2(s, (., a2), s') += delta for every co-action, unchecked.
  SymmetricGame with_reward2_shift(int s, int a2, int next, double delta) const;
  /// Copy with P(s, (a1, a2)) replaced by `row`, unchecked.
  SymmetricGame with_transition_row(int s, int a1, int a2, std::vector<double> row) const;

 private:
  explicit SymmetricGame(GameTables t) : t_(std::move(t)) {}
  GameTables t_;
};

class OwnActionViolation : public std::invalid_argument {
 public:
  OwnActionViolation(int agent, int s, int a, int a_other, int next);

  int agent;
  int s;
  int a;
  int a_other;
  int next;
};

/// Exact tables plus each agent's reward as a function of its own action
/// only: rhat1[s][a][s'] = R1(s, (a, .), s'), rhat2[s][a][s'] = R2(s, (., a), s').
struct EnumeratedGame {
  GameTables tables;
  std::vector<double> rhat1;
  std::vector<double> rhat2;

  std::size_t hat_index(int s, int a, int next) const {
    return (static_cast<std::size_t>(s) * tables.n_actions + a) * tables.n_states + next;
  }
  double reward1_hat(int s, int a, int next) const { return rhat1[hat_index(s, a, next)]; }
  double reward2_hat(int s, int a, int next) const { return rhat2[hat_index(s, a, next)]; }
};

/// Throws OwnActionViolation naming (s, a, a', s') when a reward depends on
/// the other agent's action; throws std::invalid_argument above 10^4 entries.
EnumeratedGame symgame_enumerate(const SymmetricGame& game);

/// Four states in two swapped pairs (0<->1, 2<->3), two actions, rewards that
/// depend on the state and own action only.
SymmetricGame canonical_game();

/// Random game satisfying both the own-action reward property and the swap
/// symmetry. f is a random involution that may have fixed points.
SymmetricGame random_symmetric_game(Rng& rng, int n_states, int n_actions, double gamma = 0.9);

/// Markov-game wrapper. Agent 1 observes onehot(s), agent 2 observes
/// onehot(f(s)); initial state uniform; episodes end after max_episode_steps.
class SymGameEnv final : public Environment {
 public:
  SymGameEnv(EnvSpec spec, SymmetricGame game);

  std::vector<Observation> reset(std::uint64_t seed) override;
  std::vector<Observation> reset() override;
  StepResult step(std::span<const int> actions) override;

  int n_agents() const override { return 2; }
  int obs_dim() const override { return game_.n_states(); }
  int n_actions() const override { return game_.n_actions(); }

  std::string render_text() const override;
  std::string render_svg() const override;

  int state() const { return state_; }
  void set_state(int s) { state_ = s; }
  const SymmetricGame& game() const { return game_; }
  std::vector<Observation> observations() const;

 private:
  SymmetricGame game_;
  Rng rng_;
  int state_ = 0;
  int step_ = 0;
};

}  // namespace seac::envs
