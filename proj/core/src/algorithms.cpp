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

#include "seac/algorithms.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "seac/optim.hpp"

namespace seac::algo {

namespace {

Matrix column(std::span<const double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t k = 0; k < v.size(); ++k) m(static_cast<Eigen::Index>(k), 0) = v[k];
  return m;
}

void check_rollout(const AgentRollout& r, int n_envs, int n_steps, const char* who) {
  const std::size_t rows = static_cast<std::size_t>(n_envs) * n_steps;
  if (n_envs < 1 || n_steps < 1 || r.actions.size() != rows || r.behavior_log_probs.size() != rows ||
      r.rewards.size() != rows || r.boundaries.size() != rows ||
      static_cast<std::size_t>(r.obs.rows()) != rows || static_cast<std::size_t>(r.next_obs.rows()) != rows ||
      r.obs.cols() != r.next_obs.cols()) {
    throw BatchAlignmentError(fmt::format("{}: rollout does not hold {} envs x {} steps", who, n_envs, n_steps));
  }
}

struct ObjectiveParts {
  ad::Tensor total;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
};

ObjectiveParts build_own(ad::Tape& tape, nn::AgentParams& agent, const AgentRollout& r, int n_envs,
                         int n_steps, const ActorCriticConfig& cfg) {
  const Matrix y = column(rollout_targets(r, n_envs, n_steps, agent.theta, cfg.gamma));
  nn::CategoricalDist dist = nn::policy_forward(tape, r.obs, agent.phi);
  ad::Tensor log_pa = ad::gather(dist.log_probs, r.actions);
  ad::Tensor v = nn::value_forward(tape, r.obs, agent.theta);
  const Matrix advantage = y - v.value();

  ad::Tensor policy = -1.0 * ad::mean(log_pa * tape.constant(advantage));
  ad::Tensor value = ad::mean(ad::squared_difference(v, tape.constant(y)));
  ad::Tensor ent = ad::mean(nn::entropy(dist));
  ad::Tensor total = (policy + cfg.value_coef * value) - cfg.entropy_coef * ent;
  return {total, policy.item(), value.item(), ent.item()};
}

struct SharedParts {
  ad::Tensor policy;
  ad::Tensor value;
};

SharedParts build_shared(ad::Tape& tape, nn::AgentParams& learner, const nn::AgentParams& behaviour,
                         const AgentRollout& r, int n_envs, int n_steps, const ActorCriticConfig& cfg,
                         std::vector<double>& weights_out) {
  const Eigen::Index rows = static_cast<Eigen::Index>(r.rows());
  const Matrix lp_learner = nn::policy_log_probs(r.obs, learner.phi);
  const Matrix lp_behaviour = nn::policy_log_probs(r.obs, behaviour.phi);
  Matrix w(rows, 1);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const int a = r.actions[static_cast<std::size_t>(k)];
    double ratio = importance_weight(lp_learner(k, a), lp_behaviour(k, a));
    if (cfg.is_clip > 0.0) ratio = std::min(ratio, cfg.is_clip);
    w(k, 0) = ratio;
    weights_out.push_back(ratio);
  }

  const Matrix y = column(rollout_targets(r, n_envs, n_steps, learner.theta, cfg.gamma));
  nn::CategoricalDist dist = nn::policy_forward(tape, r.obs, learner.phi);
  ad::Tensor log_pa = ad::gather(dist.log_probs, r.actions);
  ad::Tensor v = nn::value_forward(tape, r.obs, learner.theta);
  const Matrix weighted_adv = w.cwiseProduct(y - v.value());

  ad::Tensor policy = -1.0 * ad::mean(log_pa * tape.constant(weighted_adv));
  ad::Tensor value = ad::mean(tape.constant(w) * ad::squared_difference(v, tape.constant(y)));
  return {policy, value};
}

}  // namespace

void RolloutBatch::validate() const {
  if (agents.empty()) throw BatchAlignmentError("rollout batch has no agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    check_rollout(agents[i], n_envs, n_steps, "rollout batch");
    if (agents[i].boundaries != agents[0].boundaries) {
      throw BatchAlignmentError(fmt::format("agent {} episode boundaries differ from agent 0", i));
    }
  }
}

std::vector<double> nstep_targets(std::span<const double> rewards, std::span<const Boundary> boundaries,
                                  std::span<const double> next_values, double gamma) {
  const std::size_t n = rewards.size();
  if (boundaries.size() != n || next_values.size() != n) {
    throw std::invalid_argument("nstep_targets: rewards, boundaries and next_values differ in length");
  }
  std::vector<double> y(n);
  double ret = n > 0 ? next_values[n - 1] : 0.0;
  for (std::size_t t = n; t-- > 0;) {
    switch (boundaries[t]) {
      case Boundary::kTerminal: ret = rewards[t]; break;
      case Boundary::kTruncated: ret = rewards[t] + gamma * next_values[t]; break;
      case Boundary::kNone: ret = rewards[t] + gamma * ret; break;
    }
    y[t] = ret;
  }
  return y;
}

std::vector<double> nstep_targets(std::span<const double> rewards, std::span<const bool> dones,
                                  double bootstrap_value, double gamma) {
  const std::size_t n = rewards.size();
  if (dones.size() != n) throw std::invalid_argument("nstep_targets: rewards and dones differ in length");
  std::vector<Boundary> b(n);
  for (std::size_t t = 0; t < n; ++t) b[t] = dones[t] ? Boundary::kTerminal : Boundary::kNone;
  std::vector<double> next(n, 0.0);
  if (n > 0) next[n - 1] = bootstrap_value;
  return nstep_targets(rewards, b, next, gamma);
}

std::vector<double> rollout_targets(const AgentRollout& r, int n_envs, int n_steps, const nn::Mlp& critic,
                                    double gamma) {
  check_rollout(r, n_envs, n_steps, "rollout_targets");
  const Matrix next_v = nn::state_values(r.next_obs, critic);
  std::vector<double> out;
  out.reserve(r.rows());
  const std::span<const double> nv(next_v.data(), static_cast<std::size_t>(next_v.size()));
  for (int e = 0; e < n_envs; ++e) {
    const std::size_t off = static_cast<std::size_t>(e) * n_steps;
    const auto y = nstep_targets(std::span(r.rewards).subspan(off, n_steps),
                                 std::span(r.boundaries).subspan(off, n_steps), nv.subspan(off, n_steps), gamma);
    out.insert(out.end(), y.begin(), y.end());
  }
  return out;
}

double importance_weight(double log_prob_i, double log_prob_k) {
  const double w = std::exp(log_prob_i - log_prob_k);
  if (!std::isfinite(w)) {
    throw ad::NonFiniteError(
        fmt::format("importance weight exp({} - {}) is not finite", log_prob_i, log_prob_k));
  }
  return w;
}

LossTerms iac_loss(nn::AgentParams& agent, const AgentRollout& own, int n_envs, int n_steps,
                   const ActorCriticConfig& cfg, bool backward) {
  ad::Tape tape;
  ObjectiveParts o = build_own(tape, agent, own, n_envs, n_steps, cfg);
  if (backward) tape.backpropagate(o.total);
  LossTerms out;
  out.policy = o.policy;
  out.value = o.value;
  out.entropy = o.entropy;
  out.total = o.total.item();
  return out;
}

LossTerms seac_loss(std::span<nn::AgentParams* const> agents, int i, const RolloutBatch& batch,
                    const ActorCriticConfig& cfg, bool backward) {
  batch.validate();
  if (agents.size() != batch.agents.size() || i < 0 || i >= static_cast<int>(agents.size())) {
    throw BatchAlignmentError("seac_loss: agent count does not match the batch");
  }
  ad::Tape tape;
  nn::AgentParams& learner = *agents[i];
  ObjectiveParts own = build_own(tape, learner, batch.agents[i], batch.n_envs, batch.n_steps, cfg);

  LossTerms out;
  ad::Tensor shared_total;
  ad::Tensor shared_policy;
  ad::Tensor shared_value;
  for (std::size_t k = 0; k < agents.size(); ++k) {
    if (static_cast<int>(k) == i) continue;
    SharedParts s = build_shared(tape, learner, *agents[k], batch.agents[k], batch.n_envs, batch.n_steps, cfg,
                                 out.importance_weights);
    shared_policy = shared_policy.valid() ? shared_policy + s.policy : s.policy;
    shared_value = shared_value.valid() ? shared_value + s.value : s.value;
  }

  out.policy = own.policy;
  out.value = own.value;
  out.entropy = own.entropy;
  ad::Tensor total = own.total;
  if (shared_policy.valid()) {
    out.shared_policy = shared_policy.item();
    out.shared_value = shared_value.item();
    shared_total = shared_policy + cfg.value_coef * shared_value;
    total = total + cfg.lambda * shared_total;
    // A zero lambda leaves the reported numbers untouched (keeps -0.0 as is).
    if (cfg.lambda != 0.0) {
      out.policy += cfg.lambda * out.shared_policy;
      out.value += cfg.lambda * out.shared_value;
    }
  }
  out.total = total.item();
  if (backward) tape.backpropagate(total);
  return out;
}

LossTerms seac_shared_terms(std::span<nn::AgentParams* const> agents, int i, const RolloutBatch& batch,
                            const ActorCriticConfig& cfg, bool backward) {
  batch.validate();
  if (agents.size() != batch.agents.size() || i < 0 || i >= static_cast<int>(agents.size())) {
    throw BatchAlignmentError("seac_shared_terms: agent count does not match the batch");
  }
  ad::Tape tape;
  LossTerms out;
  ad::Tensor policy;
  ad::Tensor value;
  for (std::size_t k = 0; k < agents.size(); ++k) {
    if (static_cast<int>(k) == i) continue;
    SharedParts s = build_shared(tape, *agents[i], *agents[k], batch.agents[k], batch.n_envs, batch.n_steps, cfg,
                                 out.importance_weights);
    policy = policy.valid() ? policy + s.policy : s.policy;
    value = value.valid() ? value + s.value : s.value;
  }
  if (!policy.valid()) return out;
  ad::Tensor total = policy + cfg.value_coef * value;
  out.shared_policy = out.policy = policy.item();
  out.shared_value = out.value = value.item();
  out.total = total.item();
  if (backward) tape.backpropagate(total);
  return out;
}

LossTerms snac_loss(nn::AgentParams& shared, const RolloutBatch& batch, const ActorCriticConfig& cfg,
                    bool backward) {
  batch.validate();
  ad::Tape tape;
  LossTerms out;
  ad::Tensor total;
  for (const AgentRollout& r : batch.agents) {
    ObjectiveParts o = build_own(tape, shared, r, batch.n_envs, batch.n_steps, cfg);
    total = total.valid() ? total + o.total : o.total;
    out.policy += o.policy;
    out.value += o.value;
    out.entropy += o.entropy;
  }
  out.total = total.item();
  if (backward) tape.backpropagate(total);
  return out;
}

double apply_update(nn::AgentParams& agent, double max_norm) {
  const ad::ParameterList all = agent.parameters();
  const double norm = ad::clip_grad_norm(all, max_norm);
  ad::adam_update(agent.phi.parameters(), agent.adam_phi);
  ad::adam_update(agent.theta.parameters(), agent.adam_theta);
  return norm;
}

// ---------------------------------------------------------------------------

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim, int id)
    : capacity_(capacity), obs_dim_(obs_dim), id_(id) {
  if (capacity == 0 || obs_dim < 1) throw std::invalid_argument("ReplayBuffer: empty capacity or obs_dim");
  obs_.resize(static_cast<Eigen::Index>(capacity), obs_dim);
  next_obs_.resize(static_cast<Eigen::Index>(capacity), obs_dim);
  actions_.resize(capacity);
  rewards_.resize(capacity);
  terminal_.resize(capacity);
}

void ReplayBuffer::push(const QTransition& t) {
  if (static_cast<int>(t.obs.size()) != obs_dim_ || static_cast<int>(t.next_obs.size()) != obs_dim_) {
    throw std::invalid_argument("ReplayBuffer::push: observation size mismatch");
  }
  const auto row = static_cast<Eigen::Index>(head_);
  for (int c = 0; c < obs_dim_; ++c) {
    obs_(row, c) = t.obs[static_cast<std::size_t>(c)];
    next_obs_(row, c) = t.next_obs[static_cast<std::size_t>(c)];
  }
  actions_[head_] = t.action;
  rewards_[head_] = t.reward;
  terminal_[head_] = t.terminal ? 1 : 0;
  head_ = (head_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

void ReplayBuffer::sample_into(std::size_t count, Rng& rng, QBatch& out) {
  if (count > size_) {
    throw std::logic_error(fmt::format("replay buffer {} holds {} tuples, {} requested", id_, size_, count));
  }
  if (out.size() == 0) {
    out.obs.resize(0, obs_dim_);
    out.next_obs.resize(0, obs_dim_);
  }
  const Eigen::Index start = static_cast<Eigen::Index>(out.size());
  const Eigen::Index end = start + static_cast<Eigen::Index>(count);
  out.obs.conservativeResize(end, obs_dim_);
  out.next_obs.conservativeResize(end, obs_dim_);
  for (Eigen::Index row = start; row < end; ++row) {
    const auto j = static_cast<Eigen::Index>(uniform_below(rng, size_));
    out.obs.row(row) = obs_.row(j);
    out.next_obs.row(row) = next_obs_.row(j);
    out.actions.push_back(actions_[static_cast<std::size_t>(j)]);
    out.rewards.push_back(rewards_[static_cast<std::size_t>(j)]);
    out.terminal.push_back(terminal_[static_cast<std::size_t>(j)]);
    out.source.push_back(id_);
  }
  drawn_ += count;
}

std::vector<ReplayBuffer> make_buffers(int n_agents, std::size_t capacity, int obs_dim) {
  std::vector<ReplayBuffer> out;
  out.reserve(static_cast<std::size_t>(n_agents));
  for (int i = 0; i < n_agents; ++i) out.emplace_back(capacity, obs_dim, i);
  return out;
}

std::vector<std::size_t> seql_counts(std::size_t m, std::size_t n_buffers) {
  if (n_buffers == 0) throw std::invalid_argument("seql_counts: no buffers");
  std::vector<std::size_t> counts(n_buffers, m / n_buffers);
  for (std::size_t k = 0; k < m % n_buffers; ++k) ++counts[k];
  return counts;
}

QBatch seql_sample(std::span<ReplayBuffer> buffers, std::size_t m, Rng& rng) {
  const auto counts = seql_counts(m, buffers.size());
  for (std::size_t k = 0; k < buffers.size(); ++k) {
    if (buffers[k].size() < counts[k]) {
      throw std::logic_error(fmt::format("seql_sample: buffer {} holds {} tuples, needs {}", k,
                                         buffers[k].size(), counts[k]));
    }
  }
  QBatch out;
  for (std::size_t k = 0; k < buffers.size(); ++k) buffers[k].sample_into(counts[k], rng, out);
  return out;
}

QBatch iql_sample(ReplayBuffer& buffer, std::size_t m, Rng& rng) {
  QBatch out;
  buffer.sample_into(m, rng, out);
  return out;
}

QParams init_q(std::uint64_t seed, int obs_dim, int n_actions, ad::AdamConfig adam, std::vector<int> hidden) {
  if (obs_dim < 1 || n_actions < 1) throw std::invalid_argument("init_q: obs_dim and n_actions must be >= 1");
  Rng rng(seed);
  std::vector<int> sizes{obs_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(n_actions);
  QParams q;
  q.online = nn::Mlp::orthogonal("q.", std::move(sizes), 1.0, rng);
  q.target = q.online;
  q.adam = ad::AdamState::for_params(q.online.parameters(), adam);
  return q;
}

double dqn_loss(QParams& q, const QBatch& batch, double gamma, bool backward, double* max_abs_q) {
  const Eigen::Index m = static_cast<Eigen::Index>(batch.size());
  if (m == 0) throw std::invalid_argument("dqn_loss: empty batch");
  const Matrix next_q = q.target.predict(batch.next_obs);
  Matrix y(m, 1);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const double bootstrap = batch.terminal[k] ? 0.0 : gamma * next_q.row(j).maxCoeff();
    y(j, 0) = batch.rewards[k] + bootstrap;
  }
  ad::Tape tape;
  ad::Tensor qa = ad::gather(q.online.forward(tape, tape.constant(batch.obs)), batch.actions);
  ad::Tensor loss = ad::mean(ad::squared_difference(qa, tape.constant(y)));
  if (max_abs_q) *max_abs_q = qa.value().cwiseAbs().maxCoeff();
  if (backward) tape.backpropagate(loss);
  return loss.item();
}

double epsilon_at(std::uint64_t step, std::uint64_t total, double start, double end, double fraction) {
  const double horizon = fraction * static_cast<double>(total);
  if (horizon <= 0.0 || static_cast<double>(step) >= horizon) return end;
  return start + (end - start) * (static_cast<double>(step) / horizon);
}

}  // namespace seac::algo
