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

#include "seac/verification.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "seac/algorithms.hpp"
#include "seac/networks.hpp"

namespace seac::verify {

namespace {

using envs::EnumeratedGame;
using envs::GameTables;
using envs::SymmetricGame;

void check_same_length(std::span<const double> a, std::span<const double> b, std::span<const double> g) {
  if (a.size() != b.size() || a.size() != g.size() || a.empty()) {
    throw std::invalid_argument("is identity: pi1, pi2 and g must have the same non-zero length");
  }
}

void check_support(std::span<const double> pi1, std::span<const double> pi2) {
  for (std::size_t a = 0; a < pi1.size(); ++a) {
    if (pi1[a] > 0.0 && !(pi2[a] > 0.0)) {
      throw SupportError(fmt::format("sampling distribution has no mass on action {} (target mass {})", a, pi1[a]));
    }
  }
}

Matrix score(const TabularPolicy& pi, int obs, int a) {
  Matrix g = Matrix::Zero(pi.n_obs(), pi.n_actions());
  for (int b = 0; b < pi.n_actions(); ++b) g(obs, b) = (a == b ? 1.0 : 0.0) - pi(obs, b);
  return g;
}

void validate_setup(const TwoAgentSetup& s) {
  if (!s.game) throw std::invalid_argument("setup: no game");
  const int n = s.game->n_states();
  const int m = s.game->n_actions();
  if (s.pi1.n_obs() != n || s.pi2.n_obs() != n || s.pi1.n_actions() != m || s.pi2.n_actions() != m ||
      static_cast<int>(s.v1.size()) != n || s.coplayer.rows() != n || s.coplayer.cols() != m) {
    throw std::invalid_argument("setup: tables do not match the game");
  }
}

Matrix one_hot(int k, int n) {
  Matrix m = Matrix::Zero(1, n);
  m(0, k) = 1.0;
  return m;
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

OracleReport make_report(std::string name, double deviation, double tolerance, std::uint64_t size,
                         std::string note) {
  OracleReport r;
  r.name = std::move(name);
  r.deviation = deviation;
  r.tolerance = tolerance;
  r.pass = deviation < tolerance;
  r.enumeration_size = size;
  r.note = std::move(note);
  return r;
}

OracleReport check_is_identity(std::span<const double> pi1, std::span<const double> pi2,
                               std::span<const double> g) {
  check_same_length(pi1, pi2, g);
  check_support(pi1, pi2);
  double direct = 0.0;
  double weighted = 0.0;
  for (std::size_t a = 0; a < pi1.size(); ++a) {
    direct += pi1[a] * g[a];
    if (pi2[a] > 0.0) weighted += pi2[a] * (pi1[a] / pi2[a]) * g[a];
  }
  return make_report("is identity (exact)", std::abs(direct - weighted), 1e-12, pi1.size());
}

OracleReport check_is_identity_monte_carlo(std::span<const double> pi1, std::span<const double> pi2,
                                           std::span<const double> g, std::uint64_t samples, Rng& rng) {
  check_same_length(pi1, pi2, g);
  check_support(pi1, pi2);
  if (samples < 2) throw std::invalid_argument("is identity: need at least two samples");
  double exact = 0.0;
  for (std::size_t a = 0; a < pi1.size(); ++a) exact += pi1[a] * g[a];
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    const double u = uniform01(rng);
    std::size_t a = 0;
    double c = pi2[0];
    while (u >= c && a + 1 < pi2.size()) c += pi2[++a];
    while (!(pi2[a] > 0.0) && a > 0) --a;
    const double x = pi1[a] / pi2[a] * g[a];
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(samples);
  const double est = sum / n;
  const double var = std::max(0.0, (sum_sq - n * est * est) / (n - 1.0));
  const double se = std::sqrt(var / n);
  // The 1e-12 floor covers the zero-variance case, where every sample equals
  // the exact value up to rounding.
  return make_report("is identity (monte carlo)", std::abs(est - exact), 3.0 * se + 1e-12, samples,
                     fmt::format("estimate {:.6g}, standard error {:.3g}, budget 3 se", est, se));
}

OracleReport check_reward_symmetry(const SymmetricGame& game) {
  const GameTables& t = game.tables();
  EnumeratedGame e;
  try {
    e = envs::symgame_enumerate(game);
  } catch (const envs::OwnActionViolation& err) {
    return make_report("reward symmetry", std::numeric_limits<double>::infinity(), kExact, t.table_size(),
                       err.what());
  }
  double dev = 0.0;
  std::uint64_t count = 0;
  for (int s = 0; s < t.n_states; ++s) {
    for (int a = 0; a < t.n_actions; ++a) {
      for (int n = 0; n < t.n_states; ++n) {
        const int fs = t.swap[s];
        const int fn = t.swap[n];
        dev = std::max(dev, std::abs(e.reward1_hat(fs, a, fn) - e.reward2_hat(s, a, n)));
        dev = std::max(dev, std::abs(e.reward2_hat(fs, a, fn) - e.reward1_hat(s, a, n)));
        count += 2;
      }
    }
  }
  return make_report("reward symmetry", dev, kExact, count);
}

TabularPolicy TabularPolicy::from_logits(const Matrix& logits) {
  return {ad::log_softmax_rows(logits).array().exp().matrix()};
}

TabularPolicy TabularPolicy::random(Rng& rng, int n_obs, int n_actions, double scale) {
  Matrix logits(n_obs, n_actions);
  for (Eigen::Index k = 0; k < logits.size(); ++k) logits.data()[k] = scale * (2.0 * uniform01(rng) - 1.0);
  return from_logits(logits);
}

TwoAgentSetup TwoAgentSetup::standard(const SymmetricGame& game, TabularPolicy pi1, TabularPolicy pi2,
                                      std::vector<double> v1) {
  TwoAgentSetup s;
  s.game = &game;
  s.coplayer = pi2.probs;
  s.pi1 = std::move(pi1);
  s.pi2 = std::move(pi2);
  s.v1 = std::move(v1);
  return s;
}

TwoAgentSetup TwoAgentSetup::random(const SymmetricGame& game, Rng& rng) {
  const int n = game.n_states();
  const int m = game.n_actions();
  TabularPolicy pi1 = TabularPolicy::random(rng, n, m);
  TabularPolicy pi2 = TabularPolicy::random(rng, n, m);
  std::vector<double> v(n);
  for (double& x : v) x = 2.0 * uniform01(rng) - 1.0;
  return standard(game, std::move(pi1), std::move(pi2), std::move(v));
}

ActorSides actor_gradient_sides(const TwoAgentSetup& setup) {
  validate_setup(setup);
  const SymmetricGame& game = *setup.game;
  const EnumeratedGame e = envs::symgame_enumerate(game);
  const GameTables& t = e.tables;
  const int n = t.n_states;
  const int m = t.n_actions;
  ActorSides out;
  for (int s = 0; s < n; ++s) {
    const int fs = t.swap[s];
    Matrix on = Matrix::Zero(n, m);
    Matrix off = Matrix::Zero(n, m);
    for (int a2 = 0; a2 < m; ++a2) {
      const Matrix sc = score(setup.pi1, fs, a2);
      // Agent 1 acting a2 in f(s), co-player action from the same distribution.
      double q = 0.0;
      for (int a1 = 0; a1 < m; ++a1) {
        for (int n2 = 0; n2 < n; ++n2) {
          q += setup.coplayer(s, a1) * t.p(fs, a2, a1, n2) * (e.reward1_hat(fs, a2, n2) + t.gamma * setup.v1[n2]);
        }
      }
      on += setup.pi1(fs, a2) * q * sc;

      if (!(setup.pi2(fs, a2) > 0.0)) {
        if (setup.pi1(fs, a2) > 0.0) {
          throw SupportError(fmt::format("pi2 has no mass on action {} at observation {}", a2, fs));
        }
        continue;
      }
      const double w = setup.pi1(fs, a2) / setup.pi2(fs, a2);
      double target = 0.0;
      for (int a1 = 0; a1 < m; ++a1) {
        for (int n1 = 0; n1 < n; ++n1) {
          target += setup.coplayer(s, a1) * t.p(s, a1, a2, n1) *
                    (e.reward2_hat(s, a2, n1) + t.gamma * setup.v1[t.swap[n1]]);
        }
      }
      off += setup.pi2(fs, a2) * w * target * sc;
    }
    out.on_policy.push_back(std::move(on));
    out.off_policy.push_back(std::move(off));
  }
  return out;
}

ValueSides value_loss_sides(const TwoAgentSetup& setup) {
  validate_setup(setup);
  const EnumeratedGame e = envs::symgame_enumerate(*setup.game);
  const GameTables& t = e.tables;
  const int n = t.n_states;
  const int m = t.n_actions;
  ValueSides out;
  for (int s = 0; s < n; ++s) {
    const int fs = t.swap[s];
    const double v = setup.v1[fs];
    double on = 0.0, on_g = 0.0, off = 0.0, off_g = 0.0;
    for (int a2 = 0; a2 < m; ++a2) {
      for (int a1 = 0; a1 < m; ++a1) {
        for (int n2 = 0; n2 < n; ++n2) {
          const double p = setup.pi1(fs, a2) * setup.coplayer(s, a1) * t.p(fs, a2, a1, n2);
          const double d = v - (e.reward1_hat(fs, a2, n2) + t.gamma * setup.v1[n2]);
          on += p * d * d;
          on_g += p * 2.0 * d;
        }
      }
      if (!(setup.pi2(fs, a2) > 0.0)) {
        if (setup.pi1(fs, a2) > 0.0) {
          throw SupportError(fmt::format("pi2 has no mass on action {} at observation {}", a2, fs));
        }
        continue;
      }
      const double w = setup.pi1(fs, a2) / setup.pi2(fs, a2);
      for (int a1 = 0; a1 < m; ++a1) {
        for (int n1 = 0; n1 < n; ++n1) {
          const double p = setup.pi2(fs, a2) * setup.coplayer(s, a1) * t.p(s, a1, a2, n1);
          const double d = v - (e.reward2_hat(s, a2, n1) + t.gamma * setup.v1[t.swap[n1]]);
          off += p * w * d * d;
          off_g += p * w * 2.0 * d;
        }
      }
    }
    out.on_policy.push_back(on);
    out.off_policy.push_back(off);
    out.on_policy_grad.push_back(on_g);
    out.off_policy_grad.push_back(off_g);
  }
  return out;
}

ImplementedShared implemented_shared_terms(const TwoAgentSetup& setup) {
  validate_setup(setup);
  const GameTables& t = setup.game->tables();
  const int n = t.n_states;
  const int m = t.n_actions;

  // Tabular actors as single linear layers on one-hot observations whose
  // weights are the log-probabilities; the critic's weights are the values.
  nn::AgentParams learner;
  learner.phi = nn::Mlp("phi.", {n, m});
  learner.phi.weight(0).value = setup.pi1.probs.array().log().matrix();
  learner.theta = nn::Mlp("theta.", {n, 1});
  for (int k = 0; k < n; ++k) learner.theta.weight(0).value(k, 0) = setup.v1[k];
  nn::AgentParams other;
  other.agent_index = 1;
  other.phi = nn::Mlp("phi.", {n, m});
  other.phi.weight(0).value = setup.pi2.probs.array().log().matrix();
  other.theta = nn::Mlp("theta.", {n, 1});
  std::vector<nn::AgentParams*> agents{&learner, &other};

  algo::ActorCriticConfig cfg;
  cfg.gamma = t.gamma;
  cfg.value_coef = 1.0;
  cfg.entropy_coef = 0.0;
  cfg.lambda = 1.0;

  ImplementedShared out;
  for (int s = 0; s < n; ++s) {
    const int fs = t.swap[s];
    Matrix pg = Matrix::Zero(n, m);
    double vl = 0.0;
    double vg = 0.0;
    for (int a1 = 0; a1 < m; ++a1) {
      for (int a2 = 0; a2 < m; ++a2) {
        for (int next = 0; next < n; ++next) {
          const double p = setup.coplayer(s, a1) * setup.pi2(fs, a2) * t.p(s, a1, a2, next);
          if (p == 0.0) continue;
          algo::RolloutBatch batch;
          batch.n_envs = 1;
          batch.n_steps = 1;
          batch.agents.resize(2);
          algo::AgentRollout& r1 = batch.agents[0];
          r1.obs = one_hot(s, n);
          r1.next_obs = one_hot(next, n);
          r1.actions = {a1};
          r1.behavior_log_probs = {std::log(setup.pi1(s, a1))};
          r1.rewards = {t.r1(s, a1, a2, next)};
          r1.boundaries = {algo::Boundary::kNone};
          algo::AgentRollout& r2 = batch.agents[1];
          r2.obs = one_hot(fs, n);
          r2.next_obs = one_hot(t.swap[next], n);
          r2.actions = {a2};
          r2.behavior_log_probs = {std::log(setup.pi2(fs, a2))};
          r2.rewards = {t.r2(s, a1, a2, next)};
          r2.boundaries = {algo::Boundary::kNone};

          learner.zero_grad();
          const algo::LossTerms lt = algo::seac_shared_terms(agents, 0, batch, cfg);
          pg += p * learner.phi.weight(0).grad;
          vl += p * lt.shared_value;
          vg += p * learner.theta.weight(0).grad(fs, 0);
          ++out.transitions;
        }
      }
    }
    out.policy_grad.push_back(std::move(pg));
    out.value_loss.push_back(vl);
    out.value_grad.push_back(vg);
  }
  return out;
}

OracleReport check_actor_gradient_proposition(const TwoAgentSetup& setup, double tolerance) {
  const ActorSides sides = actor_gradient_sides(setup);
  double dev = 0.0;
  for (std::size_t s = 0; s < sides.on_policy.size(); ++s) {
    dev = std::max(dev, max_abs(sides.on_policy[s] - sides.off_policy[s]));
  }
  const GameTables& t = setup.game->tables();
  return make_report("actor gradient proposition", dev, tolerance, t.table_size());
}

OracleReport check_value_loss_proposition(const TwoAgentSetup& setup, double tolerance) {
  const ValueSides sides = value_loss_sides(setup);
  double dev = 0.0;
  for (std::size_t s = 0; s < sides.on_policy.size(); ++s) {
    dev = std::max(dev, std::abs(sides.on_policy[s] - sides.off_policy[s]));
    dev = std::max(dev, std::abs(sides.on_policy_grad[s] - sides.off_policy_grad[s]));
  }
  const GameTables& t = setup.game->tables();
  return make_report("value loss proposition", dev, tolerance, t.table_size());
}

OracleReport check_seac_implementation(const TwoAgentSetup& setup, double tolerance) {
  const ActorSides actor = actor_gradient_sides(setup);
  const ValueSides value = value_loss_sides(setup);
  const ImplementedShared impl = implemented_shared_terms(setup);
  double dev = 0.0;
  for (std::size_t s = 0; s < impl.policy_grad.size(); ++s) {
    // The loss is the negated objective, so its gradient is minus the
    // importance-weighted expectation.
    dev = std::max(dev, max_abs(impl.policy_grad[s] + actor.off_policy[s]));
    dev = std::max(dev, std::abs(impl.value_loss[s] - value.off_policy[s]));
    dev = std::max(dev, std::abs(impl.value_grad[s] - value.off_policy_grad[s]));
  }
  return make_report("seac shared terms vs enumeration", dev, tolerance, impl.transitions);
}

std::vector<OracleReport> run_suite(const SuiteOptions& options) {
  std::vector<OracleReport> out;
  Rng rng(options.seed);

  // Canonical game.
  const SymmetricGame canon = envs::canonical_game();
  const TwoAgentSetup cs = TwoAgentSetup::random(canon, rng);
  auto tag = [](OracleReport r, const std::string& family) {
    r.name = family + ": " + r.name;
    return r;
  };
  out.push_back(tag(check_reward_symmetry(canon), "canonical"));
  {
    std::vector<double> pi1(4), pi2(4), g(4);
    const TabularPolicy p1 = TabularPolicy::random(rng, 1, 4);
    const TabularPolicy p2 = TabularPolicy::random(rng, 1, 4);
    for (int a = 0; a < 4; ++a) {
      pi1[a] = p1(0, a);
      pi2[a] = p2(0, a);
      g[a] = 2.0 * uniform01(rng) - 1.0;
    }
    out.push_back(tag(check_is_identity(pi1, pi2, g), "canonical"));
    out.push_back(tag(check_is_identity_monte_carlo(pi1, pi2, g, options.mc_samples, rng), "canonical"));
  }
  out.push_back(tag(check_actor_gradient_proposition(cs), "canonical"));
  out.push_back(tag(check_value_loss_proposition(cs), "canonical"));
  out.push_back(tag(check_seac_implementation(cs), "canonical"));

  // Random games; each family report carries the worst deviation.
  const std::string family = fmt::format("{} random games", options.random_games);
  OracleReport sym = make_report("reward symmetry", 0.0, kExact, 0);
  OracleReport is = make_report("is identity (exact)", 0.0, 1e-12, 0);
  OracleReport actor = make_report("actor gradient proposition", 0.0, 1e-10, 0);
  OracleReport value = make_report("value loss proposition", 0.0, 1e-10, 0);
  OracleReport impl = make_report("seac shared terms vs enumeration", 0.0, 1e-8, 0);
  auto fold = [](OracleReport& into, const OracleReport& r) {
    into.deviation = std::max(into.deviation, r.deviation);
    into.enumeration_size += r.enumeration_size;
    into.pass = into.pass && r.pass;
  };
  for (int k = 0; k < options.random_games; ++k) {
    const int n_states = 2 + static_cast<int>(uniform_below(rng, 5));
    const int n_actions = 2 + static_cast<int>(uniform_below(rng, 2));
    const SymmetricGame game = envs::random_symmetric_game(rng, n_states, n_actions);
    const TwoAgentSetup setup = TwoAgentSetup::random(game, rng);
    fold(sym, check_reward_symmetry(game));
    std::vector<double> pi1(4), pi2(4), g(4);
    const TabularPolicy p1 = TabularPolicy::random(rng, 1, 4);
    const TabularPolicy p2 = TabularPolicy::random(rng, 1, 4);
    for (int a = 0; a < 4; ++a) {
      pi1[a] = p1(0, a);
      pi2[a] = p2(0, a);
      g[a] = 2.0 * uniform01(rng) - 1.0;
    }
    fold(is, check_is_identity(pi1, pi2, g));
    fold(actor, check_actor_gradient_proposition(setup));
    fold(value, check_value_loss_proposition(setup));
    fold(impl, check_seac_implementation(setup));
  }
  for (OracleReport* r : {&sym, &is, &actor, &value, &impl}) {
    r->pass = r->pass && r->deviation < r->tolerance;
    out.push_back(tag(*r, family));
  }
  return out;
}

std::string format_reports(std::span<const OracleReport> reports) {
  std::size_t width = 5;
  for (const auto& r : reports) width = std::max(width, r.name.size());
  std::string s = fmt::format("{:<{}}  {:>12}  {:>12}  {:>9}  {}\n", "check", width, "deviation", "tolerance",
                              "size", "result");
  for (const auto& r : reports) {
    s += fmt::format("{:<{}}  {:>12.3e}  {:>12.3e}  {:>9}  {}\n", r.name, width, r.deviation, r.tolerance,
                     r.enumeration_size, r.pass ? "PASS" : "FAIL");
    if (!r.note.empty()) s += fmt::format("    {}\n", r.note);
  }
  return s;
}

}  // namespace seac::verify
