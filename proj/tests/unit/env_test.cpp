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
#include <set>

#include "seac/env.hpp"
#include "seac/lbf.hpp"
#include "seac/rware.hpp"
#include "seac/symgame.hpp"
#include "seac/trace.hpp"

namespace seac::envs {
namespace {

std::vector<int> random_actions(Rng& rng, const Environment& env) {
  std::vector<int> a(env.n_agents());
  for (auto& x : a) x = static_cast<int>(uniform_below(rng, env.n_actions()));
  return a;
}

TEST(Presets, ParseAndDescribe) {
  const auto s = preset("lbf-8x8-2p-2f-coop");
  EXPECT_EQ(s.kind, EnvKind::kLbf);
  EXPECT_EQ(s.rows, 8);
  EXPECT_EQ(s.n_agents, 2);
  EXPECT_EQ(s.n_food, 2);
  EXPECT_TRUE(s.cooperative);
  const auto r = preset("rware-tiny-4ag-hard");
  EXPECT_EQ(r.n_requests, 2);
  EXPECT_EQ(preset("rware-small-4ag").n_requests, 4);
  EXPECT_EQ(preset("rware-small-4ag").rows, 20);
  EXPECT_THROW(preset("lbf-8x8"), std::invalid_argument);
  for (const auto& name : preset_names()) EXPECT_NO_THROW(make_env(preset(name))) << name;
}

TEST(Lbf, ResetIsDeterministic) {
  auto a = make_env(preset("lbf-10x10-3p-3f"));
  auto b = make_env(preset("lbf-10x10-3p-3f"));
  EXPECT_EQ(a->reset(42), b->reset(42));
  EXPECT_NE(a->reset(43), b->reset(42));
}

TEST(Lbf, DistinctOccupiedCells) {
  LbfEnv env(preset("lbf-8x8-2p-2f-coop"));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    env.reset(seed);
    std::set<std::pair<int, int>> cells;
    for (const auto& a : env.state().agents) cells.insert({a.pos.row, a.pos.col});
    for (const auto& f : env.state().foods) cells.insert({f.pos.row, f.pos.col});
    EXPECT_EQ(cells.size(), 4u);
  }
}

TEST(Lbf, ObservationLayout) {
  LbfEnv env(preset("lbf-12x12-2p-1f"));
  const auto obs = env.reset(3);
  ASSERT_EQ(obs.size(), 2u);
  ASSERT_EQ(static_cast<int>(obs[0].size()), env.obs_dim());
  const auto& s = env.state();
  EXPECT_DOUBLE_EQ(obs[1][3], s.agents[1].pos.row / 11.0);
  EXPECT_DOUBLE_EQ(obs[1][6], s.agents[0].pos.row / 11.0);
  EXPECT_DOUBLE_EQ(obs[0][2], static_cast<double>(s.foods[0].level) / env.max_food_level());
}

LbfState two_agent_state(int level0, int level1, int food_level) {
  LbfState s;
  s.rows = s.cols = 5;
  s.agents = {{{2, 1}, level0}, {{4, 4}, level1}};
  s.foods = {{{2, 2}, food_level, false}};
  s.food_level_total = food_level;
  return s;
}

TEST(Lbf, LoneAgentCollectsAndGetsOne) {
  LbfEnv env(preset("lbf-12x12-2p-1f"));
  env.reset(0);
  auto s = two_agent_state(1, 1, 1);
  s.rows = s.cols = 12;
  env.set_state(s);
  const std::vector<int> act{kLoad, kLoad};
  const auto r = env.step(act);
  EXPECT_EQ(r.rewards[0], 1.0);
  EXPECT_EQ(r.rewards[1], 0.0);
  EXPECT_TRUE(r.done);
  EXPECT_FALSE(r.info.truncated);
}

TEST(Lbf, CoalitionSplitsByLevel) {
  auto s = two_agent_state(1, 2, 3);
  s.agents[1].pos = {1, 2};
  const std::vector<int> loaders{0, 1};
  const auto r = lbf_resolve_loads(s, loaders);
  EXPECT_DOUBLE_EQ(r[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r[1], 2.0 / 3.0);
  EXPECT_TRUE(s.foods[0].collected);
}

TEST(Lbf, InsufficientLevelCollectsNothing) {
  auto s = two_agent_state(1, 1, 2);
  const std::vector<int> loaders{0};
  const auto r = lbf_resolve_loads(s, loaders);
  EXPECT_EQ(r[0], 0.0);
  EXPECT_FALSE(s.foods[0].collected);
}

TEST(Lbf, CooperativeNeedsEveryAgent) {
  LbfEnv env(preset("lbf-8x8-2p-2f-coop"));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    env.reset(seed);
    const auto& s = env.state();
    const int total = s.agents[0].level + s.agents[1].level;
    for (const auto& f : s.foods) EXPECT_EQ(f.level, total);
  }
  auto s = two_agent_state(3, 1, 4);
  const std::vector<int> loaders{0};
  EXPECT_EQ(lbf_resolve_loads(s, loaders)[0], 0.0);
  EXPECT_FALSE(s.foods[0].collected);
}

TEST(Lbf, TwoFoodsAcrossEpisodeSumToOne) {
  LbfState s;
  s.rows = s.cols = 6;
  s.agents = {{{1, 0}, 1}, {{4, 0}, 2}};
  s.foods = {{{1, 1}, 1, false}, {{4, 1}, 2, false}};
  s.food_level_total = 3;
  const std::vector<int> first{0};
  const std::vector<int> second{1};
  const auto r1 = lbf_resolve_loads(s, first);
  const auto r2 = lbf_resolve_loads(s, second);
  EXPECT_NEAR(r1[0] + r1[1] + r2[0] + r2[1], 1.0, 1e-15);
}

TEST(Lbf, MovesIntoSameCellCancel) {
  LbfEnv env(preset("lbf-8x8-2p-2f-coop"));
  env.reset(0);
  LbfState s;
  s.rows = s.cols = 8;
  s.agents = {{{3, 2}, 1}, {{3, 4}, 1}};
  s.foods = {{{0, 0}, 2, false}, {{7, 7}, 2, false}};
  s.food_level_total = 4;
  env.set_state(s);
  const std::vector<int> act{kEast, kWest};
  env.step(act);
  EXPECT_EQ(env.state().agents[0].pos, (Cell{3, 2}));
  EXPECT_EQ(env.state().agents[1].pos, (Cell{3, 4}));
}

TEST(Lbf, InvalidActionThrows) {
  auto env = make_env(preset("lbf-8x8-2p-2f-coop"));
  env->reset(0);
  const std::vector<int> bad{0, 5};
  EXPECT_THROW(env->step(bad), std::out_of_range);
  const std::vector<int> short_list{0};
  EXPECT_THROW(env->step(short_list), std::out_of_range);
}

TEST(Lbf, InfeasibleGridRejected) {
  EnvSpec s = preset("lbf-8x8-2p-2f-coop");
  s.rows = s.cols = 3;
  s.n_food = 3;
  EXPECT_THROW(LbfEnv(s).reset(0), InfeasibleSpec);
}

TEST(Lbf, SolvedEpisodesReturnOne) {
  EnvSpec spec = preset("lbf-8x8-2p-2f-coop");
  spec.rows = spec.cols = 7;
  spec.cooperative = false;
  spec.max_episode_steps = 1000000;
  LbfEnv env(spec);
  Rng rng(7);
  for (int ep = 0; ep < 100; ++ep) {
    env.reset(derive_seed(9, ep));
    double total = 0.0;
    StepResult r;
    do {
      r = env.step(random_actions(rng, env));
      for (double x : r.rewards) total += x;
    } while (!r.done);
    ASSERT_FALSE(r.info.truncated) << "episode " << ep << "\n" << env.render_text();
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Rware, GridAndShelfCounts) {
  const auto tiny = RwareLayout::make(RwareSize::kTiny);
  const auto small = RwareLayout::make(RwareSize::kSmall);
  EXPECT_EQ(tiny.rows, 11);
  EXPECT_EQ(tiny.cols, 10);
  EXPECT_EQ(small.rows, 20);
  RwareEnv t(preset("rware-tiny-2ag"));
  t.reset(0);
  EXPECT_EQ(t.state().shelves.size(), 32u);
  RwareEnv s(preset("rware-small-4ag"));
  s.reset(0);
  EXPECT_EQ(s.state().shelves.size(), 80u);
  for (const auto& g : tiny.goals) EXPECT_TRUE(tiny.is_corridor(g));
}

TEST(Rware, RequestQueueLengthEqualsAgents) {
  RwareEnv env(preset("rware-tiny-2ag"));
  env.reset(1);
  EXPECT_EQ(env.state().requests.size(), 2u);
  const std::set<int> unique(env.state().requests.begin(), env.state().requests.end());
  EXPECT_EQ(unique.size(), 2u);
}

TEST(Rware, DeliveryRewardsAndReplacesRequest) {
  RwareEnv env(preset("rware-tiny-2ag"));
  env.reset(5);
  RwareState s = env.state();
  const Cell goal = env.layout().goals[0];
  const int shelf = s.requests[0];
  s.agents[0].pos = {goal.row - 1, goal.col};
  s.agents[0].heading = Heading::kSouth;
  s.agents[0].carrying = shelf;
  s.shelves[shelf].pos = s.agents[0].pos;
  s.agents[1].pos = {0, 0};
  s.agents[1].carrying = -1;
  env.set_state(s);
  const std::vector<int> act{kForward, kTurnLeft};
  const auto r = env.step(act);
  EXPECT_EQ(r.rewards[0], 1.0);
  EXPECT_EQ(r.rewards[1], 0.0);
  EXPECT_EQ(r.info.events, 1);
  const auto& q = env.state().requests;
  EXPECT_EQ(q.size(), 2u);
  EXPECT_FALSE(env.state().requested(shelf));
  EXPECT_NE(q[0], q[1]);
}

TEST(Rware, LoadedAgentBlockedByStoredShelf) {
  RwareEnv env(preset("rware-tiny-2ag"));
  env.reset(5);
  RwareState s = env.state();
  // Carry shelf 0 out into the aisle beside it, then try to drive back under the rack.
  const Cell rack = s.shelves[1].pos;
  s.agents[0].pos = {rack.row, rack.col - 1};
  s.agents[0].heading = Heading::kEast;
  s.agents[0].carrying = 0;
  s.shelves[0].pos = s.agents[0].pos;
  s.agents[1].pos = {10, 0};
  env.set_state(s);
  const std::vector<int> act{kForward, kTurnLeft};
  env.step(act);
  EXPECT_EQ(env.state().agents[0].pos, (Cell{rack.row, rack.col - 1}));
}

TEST(Rware, UnloadOnlyOnFreeRackCell) {
  RwareEnv env(preset("rware-tiny-2ag"));
  env.reset(5);
  RwareState s = env.state();
  s.agents[0].pos = {0, 0};
  s.agents[0].carrying = 3;
  s.shelves[3].pos = {0, 0};
  s.agents[1].pos = {10, 0};
  env.set_state(s);
  const std::vector<int> act{kToggleLoad, kTurnLeft};
  env.step(act);
  EXPECT_EQ(env.state().agents[0].carrying, 3);
}

TEST(Rware, RandomRolloutInvariants) {
  RwareEnv env(preset("rware-tiny-4ag-hard"));
  Rng rng(3);
  env.reset(11);
  for (int t = 0; t < 2000; ++t) {
    const auto r = env.step(random_actions(rng, env));
    for (double x : r.rewards) EXPECT_TRUE(x == 0.0 || x == 1.0);
    EXPECT_EQ(env.state().requests.size(), 2u);
    std::set<std::pair<int, int>> cells;
    for (const auto& a : env.state().agents) cells.insert({a.pos.row, a.pos.col});
    ASSERT_EQ(cells.size(), 4u);
    if (r.done) env.reset();
  }
}

TEST(SymGame, CanonicalIsValid) {
  const auto g = canonical_game();
  EXPECT_EQ(g.n_states(), 4);
  EXPECT_FALSE(g.find_swap_violation().has_value());
  EXPECT_NO_THROW(symgame_enumerate(g));
}

TEST(SymGame, OwnActionRewardsAccepted) {
  Rng rng(1);
  const auto g = random_symmetric_game(rng, 3, 2);
  const auto e = symgame_enumerate(g);
  const auto& t = e.tables;
  for (int s = 0; s < t.n_states; ++s) {
    for (int a = 0; a < t.n_actions; ++a) {
      for (int n = 0; n < t.n_states; ++n) EXPECT_EQ(e.reward1_hat(s, a, n), t.r1(s, a, 1, n));
    }
  }
}

TEST(SymGame, CoActionDependenceRejected) {
  auto t = canonical_game().tables();
  t.reward1[t.index(0, 0, 1, 2)] += 0.5;
  const auto bad = SymmetricGame::create_unchecked(t);
  try {
    symgame_enumerate(bad);
    FAIL();
  } catch (const OwnActionViolation& v) {
    EXPECT_EQ(v.agent, 1);
    EXPECT_EQ(v.s, 0);
  }
}

TEST(SymGame, AsymmetricGameFailsConstruction) {
  auto t = canonical_game().tables();
  t.reward2[t.index(1, 0, 0, 0)] += 0.25;
  EXPECT_THROW(SymmetricGame::create(t), GameConstructionError);
  auto p = canonical_game().tables();
  p.swap = {0, 0, 3, 2};
  EXPECT_THROW(SymmetricGame::create(p), GameConstructionError);
}

TEST(SymGame, EnvObservationsSwapRoles) {
  auto env = make_env(preset("symgame"));
  auto* sg = dynamic_cast<SymGameEnv*>(env.get());
  ASSERT_NE(sg, nullptr);
  const auto obs = env->reset(4);
  const int s = sg->state();
  EXPECT_EQ(obs[0][s], 1.0);
  EXPECT_EQ(obs[1][sg->game().swap(s)], 1.0);
}

std::vector<std::string> trajectory(const EnvSpec& spec, std::uint64_t seed) {
  auto env = make_env(spec);
  Rng rng(seed + 1);
  std::vector<std::string> out;
  auto obs = env->reset(seed);
  for (int t = 0; t < 300; ++t) {
    const auto act = random_actions(rng, *env);
    const auto r = env->step(act);
    TraceRecord rec;
    rec.step = t;
    for (const auto& o : r.observations) rec.obs_hash.push_back(observation_hash(o));
    rec.actions = act;
    rec.rewards = r.rewards;
    rec.done = r.done;
    out.push_back(to_json_line(rec) + env->render_text());
    if (r.done) env->reset();
  }
  return out;
}

TEST(Determinism, FullTrajectoriesRepeat) {
  for (const auto& name : preset_names()) {
    const auto spec = preset(name);
    EXPECT_EQ(trajectory(spec, 17), trajectory(spec, 17)) << name;
    EXPECT_NE(trajectory(spec, 17), trajectory(spec, 18)) << name;
  }
}

TEST(Render, TextAndSvg) {
  LbfEnv env(preset("lbf-8x8-2p-2f-coop"));
  env.reset(0);
  const std::string text = env.render_text();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 8);
  EXPECT_NE(text.find('A'), std::string::npos);
  const std::string svg = env.render_svg();
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  RwareEnv w(preset("rware-tiny-2ag"));
  w.reset(0);
  const std::string wt = w.render_text();
  EXPECT_EQ(std::count(wt.begin(), wt.end(), 'G'), 2 - std::count_if(w.state().agents.begin(), w.state().agents.end(),
                                                                       [&](const RwareAgent& a) {
                                                                         return w.layout().is_goal(a.pos);
                                                                       }));
}

TEST(Trace, JsonRoundTrip) {
  TraceRecord rec;
  rec.episode = 3;
  rec.step = 7;
  rec.obs_hash = {0xfedcba9876543210ULL, 7};
  rec.actions = {1, 4};
  rec.rewards = {0.25, 1.0 / 3.0};
  rec.done = true;
  const auto back = from_json_line(to_json_line(rec));
  EXPECT_EQ(back.obs_hash, rec.obs_hash);
  EXPECT_EQ(back.rewards, rec.rewards);
  EXPECT_EQ(back.actions, rec.actions);
  EXPECT_TRUE(back.done);
}

}  // namespace
}  // namespace seac::envs
