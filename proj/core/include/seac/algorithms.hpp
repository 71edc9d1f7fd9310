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
#include <span>
#include <stdexcept>
#include <vector>

#include "seac/networks.hpp"
#include "seac/rng.hpp"
#include "seac/tensor.hpp"

namespace seac::algo {

using ad::Matrix;

/// How an episode ended at a step, if it did.
enum class Boundary : std::uint8_t {
  kNone = 0,
  kTerminal = 1,   // true end of the episode, no bootstrap
  kTruncated = 2,  // time limit, bootstrap from the final observation
};

/// One agent's experience for a rollout window. Rows are ordered env-major:
/// row = env * n_steps + t. `next_obs` holds o_{t+1} for every row; for a
/// boundary row it is the last observation of the finished episode, and for
/// the final row of each env it is the bootstrap observation.
struct AgentRollout {
  Matrix obs;
  Matrix next_obs;
  std::vector<int> actions;
  std::vector<double> behavior_log_probs;
  std::vector<double> rewards;
  std::vector<Boundary> boundaries;

  std::size_t rows() const { return actions.size(); }
};

/// Aligned rollouts of every agent over the same timesteps.
struct RolloutBatch {
  int n_envs = 0;
  int n_steps = 0;
  std::vector<AgentRollout> agents;

  /// Throws BatchAlignmentError when agents disagree on shape or boundaries.
  void validate() const;
};

class BatchAlignmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Backward recursion over one env's window:
///   terminal:  y_t = r_t
///   truncated: y_t = r_t + gamma * next_values[t]
///   otherwise: y_t = r_t + gamma * y_{t+1}, with y_n = next_values[n-1].
std::vector<double> nstep_targets(std::span<const double> rewards, std::span<const Boundary> boundaries,
                                  std::span<const double> next_values, double gamma);

/// Convenience form: dones mark terminal steps, `bootstrap_value` is V(o_{t+n}).
std::vector<double> nstep_targets(std::span<const double> rewards, std::span<const bool> dones,
                                  double bootstrap_value, double gamma);

/// Targets for a whole rollout (all envs), bootstrapped with `critic`.
std::vector<double> rollout_targets(const AgentRollout& r, int n_envs, int n_steps, const nn::Mlp& critic,
                                    double gamma);

struct ActorCriticConfig {
  double gamma = 0.99;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double lambda = 1.0;
  /// Upper clip for importance weights; <= 0 disables clipping.
  double is_clip = 0.0;
};

struct LossTerms {
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  double total = 0.0;
  // Experience-sharing contributions before scaling by lambda.
  double shared_policy = 0.0;
  double shared_value = 0.0;
  /// Importance weights of every shared row, in (other agent, row) order.
  std::vector<double> importance_weights;
};

/// pi_i(a|o) / pi_k(a|o) from log-probabilities. Throws ad::NonFiniteError on
/// a non-finite ratio.
double importance_weight(double log_prob_i, double log_prob_k);

/// Independent actor-critic objective on the agent's own rollout:
///   policy  = -mean[log pi(a|o) * (y - V(o))]   (advantage held constant)
///   value   = mean[(V(o) - y)^2]
///   total   = policy + value_coef * value - entropy_coef * mean entropy
/// With `backward`, adds d(total)/d(params) into the agent's grads.
LossTerms iac_loss(nn::AgentParams& agent, const AgentRollout& own, int n_envs, int n_steps,
                   const ActorCriticConfig& cfg, bool backward = true);

/// Shared-experience objective of agent `i`: the independent objective on its
/// own rollout plus lambda times, for every k != i,
///   -mean[w * log pi_i(a^k|o^k) * (y^{k,i} - V_i(o^k))] + value_coef * mean[w * (V_i(o^k) - y^{k,i})^2]
/// where w = pi_i(a^k|o^k) / pi_k(a^k|o^k) with both policies at their current
/// parameters (held constant) and y^{k,i} bootstraps agent k's rewards with
/// agent i's critic. Entropy uses the own rollout only.
LossTerms seac_loss(std::span<nn::AgentParams* const> agents, int i, const RolloutBatch& batch,
                    const ActorCriticConfig& cfg, bool backward = true);

/// Only the experience-sharing terms of agent `i` (unscaled by lambda):
/// total = shared_policy + value_coef * shared_value.
LossTerms seac_shared_terms(std::span<nn::AgentParams* const> agents, int i, const RolloutBatch& batch,
                            const ActorCriticConfig& cfg, bool backward = true);

/// Shared-network objective: sum over agents of the independent objective,
/// each on its own rollout, all against the one parameter set.
LossTerms snac_loss(nn::AgentParams& shared, const RolloutBatch& batch, const ActorCriticConfig& cfg,
                    bool backward = true);

/// Clips the agent's actor and critic gradients jointly to `max_norm` and
/// takes one Adam step on each. Returns the pre-clip norm.
double apply_update(nn::AgentParams& agent, double max_norm);

// ---------------------------------------------------------------------------
// Q-learning.

struct QTransition {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  bool terminal = false;
  std::vector<double> next_obs;
};

/// Rows drawn from one or more replay buffers.
struct QBatch {
  Matrix obs;
  Matrix next_obs;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<std::uint8_t> terminal;
  /// Source buffer id of each row.
  std::vector<int> source;

  std::size_t size() const { return actions.size(); }
};

/// Fixed-capacity ring buffer, uniform sampling over filled slots.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int obs_dim, int id = 0);

  void push(const QTransition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  int obs_dim() const { return obs_dim_; }
  int id() const { return id_; }
  /// Total tuples handed out by sample_into().
  std::uint64_t samples_drawn() const { return drawn_; }

  /// Appends `count` uniformly drawn tuples (with replacement) to `out`.
  /// Throws std::logic_error when fewer than `count` tuples are stored.
  void sample_into(std::size_t count, Rng& rng, QBatch& out);

 private:
  std::size_t capacity_;
  int obs_dim_;
  int id_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;
  std::uint64_t drawn_ = 0;
  Matrix obs_;
  Matrix next_obs_;
  std::vector<int> actions_;
  std::vector<double> rewards_;
  std::vector<std::uint8_t> terminal_;
};


std::vector<ReplayBuffer> make_buffers(int n_agents, std::size_t capacity, int obs_dim);

/// Per-buffer draw counts for a shared batch of M tuples over N buffers:
/// M / N each, the remainder going one apiece to the lowest-index buffers.
std::vector<std::size_t> seql_counts(std::size_t m, std::size_t n_buffers);

/// One batch of M tuples drawn across all buffers per seql_counts().
QBatch seql_sample(std::span<ReplayBuffer> buffers, std::size_t m, Rng& rng);
/// M tuples from a single buffer.
QBatch iql_sample(ReplayBuffer& buffer, std::size_t m, Rng& rng);

struct QParams {
  nn::Mlp online;
  nn::Mlp target;
  ad::AdamState adam;
  std::uint64_t updates = 0;

  void sync_target() { target = online; }
};

QParams init_q(std::uint64_t seed, int obs_dim, int n_actions, ad::AdamConfig adam = {},
               std::vector<int> hidden = {nn::kHiddenUnits, nn::kHiddenUnits});

/// mean[(Q(o, a) - y)^2], y = r + gamma * (1 - terminal) * max_a' Q_target(o', a').
/// `max_abs_q`, when given, receives max |Q(o, a)| over the batch.
double dqn_loss(QParams& q, const QBatch& batch, double gamma, bool backward = true,
                double* max_abs_q = nullptr);

/// Linear schedule from `start` to `end` over the first `fraction` of `total`.
double epsilon_at(std::uint64_t step, std::uint64_t total, double start = 1.0, double end = 0.05,
                  double fraction = 0.1);

}  // namespace seac::algo
