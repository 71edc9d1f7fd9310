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
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seac/rng.hpp"
#include "seac/symgame.hpp"
#include "seac/tensor.hpp"

namespace seac::verify {

using ad::Matrix;

/// Tolerance used by exact checks: a report passes iff deviation < tolerance,
/// so only a deviation of exactly zero passes.
inline constexpr double kExact = std::numeric_limits<double>::denorm_min();

struct OracleReport {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::uint64_t enumeration_size = 0;
  std::string note;
};

OracleReport make_report(std::string name, double deviation, double tolerance, std::uint64_t size,
                         std::string note = {});

/// Raised when the sampling distribution misses an action the target uses.
class SupportError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact check of sum_a pi1(a) g(a) == sum_a pi2(a) (pi1(a) / pi2(a)) g(a)
/// (tolerance 1e-12).
OracleReport check_is_identity(std::span<const double> pi1, std::span<const double> pi2,
                               std::span<const double> g);

/// Weighted Monte Carlo estimate with a ~ pi2 against the exact expectation
/// under pi1; passes within three standard errors of the estimate.
OracleReport check_is_identity_monte_carlo(std::span<const double> pi1, std::span<const double> pi2,
                                           std::span<const double> g, std::uint64_t samples, Rng& rng);

/// Both reward-symmetry equalities over every (s, a, s'), exact. A game whose
/// rewards depend on the other agent's action is reported as a failure.
OracleReport check_reward_symmetry(const envs::SymmetricGame& game);

/// Explicit per-observation action distribution, indexed [obs][action]. The
/// score function is that of a softmax over per-observation logits:
/// d log pi(a|o) / d logit(o, b) = [a == b] - pi(b|o).
struct TabularPolicy {
  Matrix probs;

  static TabularPolicy from_logits(const Matrix& logits);
  static TabularPolicy random(Rng& rng, int n_obs, int n_actions, double scale = 2.0);
  double operator()(int obs, int a) const { return probs(obs, a); }
  int n_obs() const { return static_cast<int>(probs.rows()); }
  int n_actions() const { return static_cast<int>(probs.cols()); }
};

/// Agent 1 observes s, agent 2 observes f(s), so pi2 is indexed by f(s).
/// `coplayer(s, a1)` is the distribution of agent 1's action at state s in
/// agent 2's experience; the same distribution drives the co-player in the
/// mirrored state f(s) on agent 1's own side.
struct TwoAgentSetup {
  const envs::SymmetricGame* game = nullptr;
  TabularPolicy pi1;
  TabularPolicy pi2;
  std::vector<double> v1;  // agent 1's state values, by observation
  Matrix coplayer;         // [s][a1]

  /// coplayer(s, .) = pi2(. | s), the action distribution agent 2 uses when
  /// it observes s (that is, in state f(s)).
  static TwoAgentSetup standard(const envs::SymmetricGame& game, TabularPolicy pi1, TabularPolicy pi2,
                                std::vector<double> v1);
  static TwoAgentSetup random(const envs::SymmetricGame& game, Rng& rng);
};

/// Per-state expectations of the actor proposition, each an n_obs x n_actions
/// gradient with respect to agent 1's logits.
struct ActorSides {
  std::vector<Matrix> on_policy;   // E_{a2 ~ pi1(.|f(s))}[Q1(f(s), a2) grad log pi1(a2|f(s))]
  std::vector<Matrix> off_policy;  // importance-weighted, from agent 2's experience in s
};
ActorSides actor_gradient_sides(const TwoAgentSetup& setup);

struct ValueSides {
  std::vector<double> on_policy;
  std::vector<double> off_policy;
  std::vector<double> on_policy_grad;   // d/dV1(f(s)), targets held fixed
  std::vector<double> off_policy_grad;
};
ValueSides value_loss_sides(const TwoAgentSetup& setup);

/// Enumerated expectation of the implemented shared-experience terms of
/// agent 1 on single transitions from agent 2, per state s.
struct ImplementedShared {
  std::vector<Matrix> policy_grad;  // d/d logits of agent 1 (W of its tabular actor)
  std::vector<double> value_loss;
  std::vector<double> value_grad;   // d/dV1(f(s))
  std::uint64_t transitions = 0;
};
ImplementedShared implemented_shared_terms(const TwoAgentSetup& setup);

OracleReport check_actor_gradient_proposition(const TwoAgentSetup& setup, double tolerance = 1e-10);
OracleReport check_value_loss_proposition(const TwoAgentSetup& setup, double tolerance = 1e-10);
/// Implemented shared terms against the enumerated importance-weighted
/// expectations (policy gradient, value loss and value gradient).
OracleReport check_seac_implementation(const TwoAgentSetup& setup, double tolerance = 1e-8);

struct SuiteOptions {
  int random_games = 100;
  std::uint64_t seed = 2024;
  std::uint64_t mc_samples = 100000;
};

/// Canonical game plus `random_games` random games: reward symmetry, the IS
/// identity (exact and Monte Carlo), both propositions and the implemented
/// shared terms. One report per check and game family.
std::vector<OracleReport> run_suite(const SuiteOptions& options = {});

std::string format_reports(std::span<const OracleReport> reports);

}  // namespace seac::verify
