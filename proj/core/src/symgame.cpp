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

#include "seac/symgame.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seac::envs {

namespace {

void check_shapes(const GameTables& t) {
  if (t.n_states < 1 || t.n_actions < 1) throw GameConstructionError("game: empty state or action set");
  if (!(t.gamma > 0.0 && t.gamma <= 1.0)) throw GameConstructionError("game: gamma outside (0, 1]");
  if (static_cast<int>(t.swap.size()) != t.n_states) throw GameConstructionError("game: swap map size");
  for (int s = 0; s < t.n_states; ++s) {
    if (t.swap[s] < 0 || t.swap[s] >= t.n_states) {
      throw GameConstructionError(fmt::format("game: swap({}) out of range", s));
    }
  }
  const std::size_t n = t.table_size();
  if (t.transition.size() != n || t.reward1.size() != n || t.reward2.size() != n) {
    throw GameConstructionError(fmt::format("game: tables must hold {} entries", n));
  }
}

int sample_index(std::span<const double> probs, double u) {
  double c = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    c += probs[k];
    if (u < c) return static_cast<int>(k);
  }
  // Rounding left the cumulative sum short of u; take the last positive entry.
  for (std::size_t k = probs.size(); k-- > 0;) {
    if (probs[k] > 0.0) return static_cast<int>(k);
  }
  return 0;
}

}  // namespace

SymmetricGame SymmetricGame::create(GameTables tables) {
  check_shapes(tables);
  const GameTables& t = tables;
  for (int s = 0; s < t.n_states; ++s) {
    if (t.swap[t.swap[s]] != s) {
      throw GameConstructionError(fmt::format("game: swap map is not an involution at state {}", s));
    }
  }
  for (int s = 0; s < t.n_states; ++s) {
    for (int a1 = 0; a1 < t.n_actions; ++a1) {
      for (int a2 = 0; a2 < t.n_actions; ++a2) {
        double total = 0.0;
        for (int n = 0; n < t.n_states; ++n) {
          const double p = t.p(s, a1, a2, n);
          if (!(p >= 0.0)) {
            throw GameConstructionError(fmt::format("game: P({}, ({}, {}))({}) is negative", s, a1, a2, n));
          }
          total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) {
          throw GameConstructionError(
              fmt::format("game: P({}, ({}, {})) sums to {:.17g}", s, a1, a2, total));
        }
      }
    }
  }
  SymmetricGame g(std::move(tables));
  if (auto v = g.find_swap_violation()) throw GameConstructionError("game: " + *v);
  return g;
}

SymmetricGame SymmetricGame::create_unchecked(GameTables tables) {
  check_shapes(tables);
  return SymmetricGame(std::move(tables));
}

std::optional<std::string> SymmetricGame::find_swap_violation() const {
  const GameTables& t = t_;
  for (int s = 0; s < t.n_states; ++s) {
    const int fs = t.swap[s];
    for (int a1 = 0; a1 < t.n_actions; ++a1) {
      for (int a2 = 0; a2 < t.n_actions; ++a2) {
        for (int n = 0; n < t.n_states; ++n) {
          const int fn = t.swap[n];
          if (t.r1(fs, a2, a1, fn) != t.r2(s, a1, a2, n)) {
            return fmt::format("R1({}, ({}, {}), {}) = {} differs from R2({}, ({}, {}), {}) = {}", fs, a2,
                               a1, fn, t.r1(fs, a2, a1, fn), s, a1, a2, n, t.r2(s, a1, a2, n));
          }
          if (t.p(s, a1, a2, n) != t.p(fs, a2, a1, fn)) {
            return fmt::format("P({}, ({}, {}))({}) = {} differs from P({}, ({}, {}))({}) = {}", s, a1, a2,
                               n, t.p(s, a1, a2, n), fs, a2, a1, fn, t.p(fs, a2, a1, fn));
          }
        }
      }
    }
  }
  return std::nullopt;
}

SymmetricGame SymmetricGame::with_reward2_shift(int s, int a2, int next, double delta) const {
  GameTables t = t_;
  for (int a1 = 0; a1 < t.n_actions; ++a1) t.reward2[t.index(s, a1, a2, next)] += delta;
  return create_unchecked(std::move(t));
}

SymmetricGame SymmetricGame::with_transition_row(int s, int a1, int a2, std::vector<double> row) const {
  GameTables t = t_;
  if (static_cast<int>(row.size()) != t.n_states) throw std::invalid_argument("transition row size");
  std::copy(row.begin(), row.end(), t.transition.begin() + t.index(s, a1, a2, 0));
  return create_unchecked(std::move(t));
}

OwnActionViolation::OwnActionViolation(int agent_, int s_, int a_, int a_other_, int next_)
    : std::invalid_argument(fmt::format(
          "agent {} reward depends on the other agent's action at (s={}, a={}, a'={}, s'={})", agent_, s_,
          a_, a_other_, next_)),
      agent(agent_),
      s(s_),
      a(a_),
      a_other(a_other_),
      next(next_) {}

EnumeratedGame symgame_enumerate(const SymmetricGame& game) {
  const GameTables& t = game.tables();
  if (t.table_size() > 10000) {
    throw std::invalid_argument(fmt::format("game too large to enumerate ({} entries)", t.table_size()));
  }
  EnumeratedGame e;
  e.tables = t;
  const std::size_t hat = static_cast<std::size_t>(t.n_states) * t.n_actions * t.n_states;
  e.rhat1.resize(hat);
  e.rhat2.resize(hat);
  for (int s = 0; s < t.n_states; ++s) {
    for (int a = 0; a < t.n_actions; ++a) {
      for (int n = 0; n < t.n_states; ++n) {
        const double r1 = t.r1(s, a, 0, n);
        const double r2 = t.r2(s, 0, a, n);
        for (int other = 1; other < t.n_actions; ++other) {
          if (t.r1(s, a, other, n) != r1) throw OwnActionViolation(1, s, a, other, n);
          if (t.r2(s, other, a, n) != r2) throw OwnActionViolation(2, s, a, other, n);
        }
        e.rhat1[e.hat_index(s, a, n)] = r1;
        e.rhat2[e.hat_index(s, a, n)] = r2;
      }
    }
  }
  return e;
}

SymmetricGame canonical_game() {
  GameTables t;
  t.n_states = 4;
  t.n_actions = 2;
  t.gamma = 0.9;
  t.swap = {1, 0, 3, 2};
  const double base[4][2] = {{1.0, 0.0}, {0.0, 0.5}, {0.25, 0.75}, {-0.5, 1.0}};
  // Transition rows of the representative states 0 and 2, indexed [a1][a2].
  const double rep[2][2][2][4] = {
      {{{0.1, 0.2, 0.3, 0.4}, {0.5, 0.1, 0.2, 0.2}}, {{0.25, 0.25, 0.25, 0.25}, {0.0, 0.4, 0.4, 0.2}}},
      {{{0.3, 0.3, 0.2, 0.2}, {0.1, 0.6, 0.1, 0.2}}, {{0.7, 0.1, 0.1, 0.1}, {0.2, 0.2, 0.5, 0.1}}},
  };
  const std::size_t n = t.table_size();
  t.transition.assign(n, 0.0);
  t.reward1.assign(n, 0.0);
  t.reward2.assign(n, 0.0);
  for (int s = 0; s < 4; ++s) {
    for (int a1 = 0; a1 < 2; ++a1) {
      for (int a2 = 0; a2 < 2; ++a2) {
        for (int next = 0; next < 4; ++next) {
          t.reward1[t.index(s, a1, a2, next)] = base[s][a1];
          t.reward2[t.index(s, a1, a2, next)] = base[t.swap[s]][a2];
          const int r = s / 2;
          // States 0 and 2 use their rows; 1 and 3 mirror them.
          t.transition[t.index(s, a1, a2, next)] =
              s % 2 == 0 ? rep[r][a1][a2][next] : rep[r][a2][a1][t.swap[next]];
        }
      }
    }
  }
  return SymmetricGame::create(std::move(t));
}

SymmetricGame random_symmetric_game(Rng& rng, int n_states, int n_actions, double gamma) {
  if (n_states < 1 || n_actions < 1) throw std::invalid_argument("random game: empty sets");
  GameTables t;
  t.n_states = n_states;
  t.n_actions = n_actions;
  t.gamma = gamma;

  // Random involution: shuffle, then pair consecutive entries; each pair is
  // left as two fixed points with probability 1/4.
  std::vector<int> perm(n_states);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n_states; i > 1; --i) std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
  t.swap.resize(n_states);
  std::iota(t.swap.begin(), t.swap.end(), 0);
  for (int i = 0; i + 1 < n_states; i += 2) {
    if (uniform_below(rng, 4) == 0) continue;
    t.swap[perm[i]] = perm[i + 1];
    t.swap[perm[i + 1]] = perm[i];
  }

  const std::size_t n = t.table_size();
  t.transition.assign(n, 0.0);
  t.reward1.assign(n, 0.0);
  t.reward2.assign(n, 0.0);

  // Own-action reward base u[s][a][s'] in [-1, 1).
  std::vector<double> u(static_cast<std::size_t>(n_states) * n_actions * n_states);
  for (double& x : u) x = 2.0 * uniform01(rng) - 1.0;
  auto base = [&](int s, int a, int next) { return u[(static_cast<std::size_t>(s) * n_actions + a) * n_states + next]; };

  for (int s = 0; s < n_states; ++s) {
    for (int a1 = 0; a1 < n_actions; ++a1) {
      for (int a2 = 0; a2 < n_actions; ++a2) {
        for (int next = 0; next < n_states; ++next) {
          t.reward1[t.index(s, a1, a2, next)] = base(s, a1, next);
          t.reward2[t.index(s, a1, a2, next)] = base(t.swap[s], a2, t.swap[next]);
        }
      }
    }
  }

  std::vector<double> d(n_states);
  for (int s = 0; s < n_states; ++s) {
    const int fs = t.swap[s];
    if (fs < s) continue;
    for (int a1 = 0; a1 < n_actions; ++a1) {
      for (int a2 = 0; a2 < n_actions; ++a2) {
        if (fs == s && a2 < a1) continue;
        double total = 0.0;
        for (double& x : d) total += (x = uniform01(rng) + 1e-3);
        for (double& x : d) x /= total;
        if (fs == s && a1 == a2) {
          // Self-mapped entry: the row must be invariant under f.
          std::vector<double> sym(n_states);
          for (int k = 0; k < n_states; ++k) sym[k] = (d[k] + d[t.swap[k]]) / 2.0;
          d = sym;
        }
        for (int next = 0; next < n_states; ++next) {
          t.transition[t.index(s, a1, a2, next)] = d[next];
          t.transition[t.index(fs, a2, a1, t.swap[next])] = d[next];
        }
      }
    }
  }
  return SymmetricGame::create(std::move(t));
}

SymGameEnv::SymGameEnv(EnvSpec spec, SymmetricGame game)
    : Environment(std::move(spec)), game_(std::move(game)) {
  spec_.validate();
  if (spec_.n_agents != 2) throw InfeasibleSpec("symgame: exactly two agents");
}

std::vector<Observation> SymGameEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  return reset();
}

std::vector<Observation> SymGameEnv::reset() {
  state_ = static_cast<int>(uniform_below(rng_, game_.n_states()));
  step_ = 0;
  return observations();
}

std::vector<Observation> SymGameEnv::observations() const {
  std::vector<Observation> out(2, Observation(game_.n_states(), 0.0));
  out[0][state_] = 1.0;
  out[1][game_.swap(state_)] = 1.0;
  return out;
}

StepResult SymGameEnv::step(std::span<const int> actions) {
  check_actions(actions);
  const GameTables& t = game_.tables();
  const int a1 = actions[0];
  const int a2 = actions[1];
  const std::span<const double> row(t.transition.data() + t.index(state_, a1, a2, 0), t.n_states);
  const int next = sample_index(row, uniform01(rng_));
  StepResult out;
  out.rewards = {t.r1(state_, a1, a2, next), t.r2(state_, a1, a2, next)};
  state_ = next;
  ++step_;
  out.done = step_ >= spec_.max_episode_steps;
  out.info.truncated = out.done;
  out.info.episode_step = step_;
  out.observations = observations();
  return out;
}

std::string SymGameEnv::render_text() const {
  return fmt::format("state {} (swapped {}) step {}\n", state_, game_.swap(state_), step_);
}

std::string SymGameEnv::render_svg() const {
  const int n = game_.n_states();
  const int w = 40 * n + 20;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"60\" viewBox=\"0 0 {} 60\">\n", w, w);
  for (int s = 0; s < n; ++s) {
    svg += fmt::format("<circle cx=\"{}\" cy=\"30\" r=\"15\" fill=\"{}\" stroke=\"#333\"/>\n", 30 + 40 * s,
                       s == state_ ? "#f4a261" : "#ffffff");
    svg += fmt::format("<text x=\"{}\" y=\"35\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
                       30 + 40 * s, s);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace seac::envs
