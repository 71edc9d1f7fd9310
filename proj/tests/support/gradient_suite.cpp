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

#include "gradient_suite.hpp"

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"

namespace seac::testing {

namespace {

using ad::Matrix;

constexpr int kObs = 6;
constexpr int kActions = 5;
constexpr int kEnvs = 2;
constexpr int kSteps = 5;

struct Instance {
  std::vector<nn::AgentParams> agents;
  algo::RolloutBatch batch;
};

Instance make_instance(const GradientSuiteOptions& opt, std::uint64_t k, int n_agents) {
  Rng rng(derive_seed(opt.seed, k));
  Instance in;
  in.agents = make_agents(derive_seed(opt.seed, 1000 + k), n_agents, kObs, kActions, opt.hidden);
  for (auto& a : in.agents) {
    jitter(a.phi, rng, 0.15);
    jitter(a.theta, rng, 0.15);
  }
  in.batch = random_batch(rng, in.agents, kEnvs, kSteps);
  return in;
}

std::vector<double> frozen_targets(const algo::AgentRollout& r, const nn::Mlp& critic, double gamma) {
  return reference_targets(r, kEnvs, kSteps, column(nn::state_values(r.next_obs, critic)), gamma);
}

double gather_mean(const Matrix& lp, const std::vector<int>& actions, const std::vector<double>& coef) {
  double s = 0.0;
  for (std::size_t r = 0; r < actions.size(); ++r) s += lp(static_cast<Eigen::Index>(r), actions[r]) * coef[r];
  return s / static_cast<double>(actions.size());
}

struct Check {
  double rel = 0.0;
  double value_gap = 0.0;
};

/// `backward` accumulates the library gradient and returns the library's
/// value of the same objective.
Check compare(std::vector<ad::Parameter*> params, const std::function<double()>& backward,
              const std::function<double()>& oracle, double h) {
  ad::zero_grad(params);
  const double library_value = backward();
  const auto analytic = ad::gradients_of(params);
  const auto numeric = ad::finite_difference_gradient(oracle, params, h);
  return {ad::max_relative_error(analytic, numeric), std::abs(library_value - oracle())};
}

void fold(GradientCase& c, const Check& x) {
  ++c.instances;
  c.max_rel_error = std::max(c.max_rel_error, x.rel);
  c.value_mismatch = std::max(c.value_mismatch, x.value_gap);
}

}  // namespace

std::vector<GradientCase> run_gradient_suite(const GradientSuiteOptions& opt) {
  GradientCase policy{"policy loss"}, value{"value loss"}, entropy{"entropy"}, shared_policy{"shared policy terms"},
      shared_value{"shared value terms"}, dqn{"dqn loss"};
  const double gamma = 0.99;

  for (int k = 0; k < opt.instances; ++k) {
    // Own-experience policy term: advantage frozen at the current critic.
    {
      Instance in = make_instance(opt, 10 * k, 1);
      auto& ag = in.agents[0];
      const auto& r = in.batch.agents[0];
      algo::ActorCriticConfig cfg;
      cfg.value_coef = 0.0;
      cfg.entropy_coef = 0.0;
      const auto y = frozen_targets(r, ag.theta, gamma);
      const auto v = column(nn::state_values(r.obs, ag.theta));
      std::vector<double> adv(y.size());
      for (std::size_t t = 0; t < y.size(); ++t) adv[t] = y[t] - v[t];
      fold(policy, compare(
                       ag.phi.parameters(), [&] { return algo::iac_loss(ag, r, kEnvs, kSteps, cfg).policy; },
                       [&] { return -gather_mean(nn::policy_log_probs(r.obs, ag.phi), r.actions, adv); }, opt.h));
    }
    // Value term: targets frozen.
    {
      Instance in = make_instance(opt, 10 * k + 1, 1);
      auto& ag = in.agents[0];
      const auto& r = in.batch.agents[0];
      algo::ActorCriticConfig cfg;
      cfg.entropy_coef = 0.0;
      const auto y = frozen_targets(r, ag.theta, gamma);
      auto oracle = [&] {
        const Matrix v = nn::state_values(r.obs, ag.theta);
        double s = 0.0;
        for (std::size_t t = 0; t < y.size(); ++t) s += (v(t, 0) - y[t]) * (v(t, 0) - y[t]);
        return cfg.value_coef * s / static_cast<double>(y.size());
      };
      fold(value, compare(
                      ag.theta.parameters(),
                      [&] { return cfg.value_coef * algo::iac_loss(ag, r, kEnvs, kSteps, cfg).value; }, oracle,
                      opt.h));
    }
    // Entropy bonus through iac_loss: with zero rewards, zero critic output
    // and no bootstrap the advantage vanishes, leaving -entropy_coef * H.
    {
      Instance in = make_instance(opt, 10 * k + 2, 1);
      auto& ag = in.agents[0];
      auto r = in.batch.agents[0];
      std::fill(r.rewards.begin(), r.rewards.end(), 0.0);
      ag.theta.weight(ag.theta.layer_count() - 1).value.setZero();
      ag.theta.bias(ag.theta.layer_count() - 1).value.setZero();
      algo::ActorCriticConfig cfg;
      cfg.value_coef = 1.0;
      cfg.entropy_coef = 1.0;
      auto oracle = [&] { return -nn::entropy_rows(nn::policy_log_probs(r.obs, ag.phi)).mean(); };
      fold(entropy, compare(
                        ag.phi.parameters(), [&] { return algo::iac_loss(ag, r, kEnvs, kSteps, cfg).total; }, oracle,
                        opt.h));
    }
    // Shared-experience terms of agent 0 over two other agents. The policy
    // oracle uses the ratio itself, -mean[pi_i / pi_k * A], whose gradient
    // equals that of the weighted log-probability with the weight frozen.
    {
      Instance in = make_instance(opt, 10 * k + 3, 3);
      std::vector<nn::AgentParams*> ptrs;
      for (auto& a : in.agents) ptrs.push_back(&a);
      auto& me = in.agents[0];
      algo::ActorCriticConfig cfg;
      struct Frozen {
        std::vector<double> adv, y, w;
      };
      std::vector<Frozen> fr(3);
      for (int o = 1; o < 3; ++o) {
        const auto& r = in.batch.agents[o];
        fr[o].y = frozen_targets(r, me.theta, gamma);
        const auto v = column(nn::state_values(r.obs, me.theta));
        const Matrix lpi = nn::policy_log_probs(r.obs, me.phi);
        const Matrix lpk = nn::policy_log_probs(r.obs, in.agents[o].phi);
        for (std::size_t t = 0; t < v.size(); ++t) {
          fr[o].adv.push_back(fr[o].y[t] - v[t]);
          const auto row = static_cast<Eigen::Index>(t);
          fr[o].w.push_back(std::exp(lpi(row, r.actions[t]) - lpk(row, r.actions[t])));
        }
      }
      auto policy_oracle = [&] {
        double s = 0.0;
        for (int o = 1; o < 3; ++o) {
          const auto& r = in.batch.agents[o];
          const Matrix lpi = nn::policy_log_probs(r.obs, me.phi);
          const Matrix lpk = nn::policy_log_probs(r.obs, in.agents[o].phi);
          double m = 0.0;
          for (std::size_t t = 0; t < r.rows(); ++t) {
            const auto row = static_cast<Eigen::Index>(t);
            m += std::exp(lpi(row, r.actions[t]) - lpk(row, r.actions[t])) * fr[o].adv[t];
          }
          s -= m / static_cast<double>(r.rows());
        }
        return s;
      };
      auto value_oracle = [&] {
        double s = 0.0;
        for (int o = 1; o < 3; ++o) {
          const auto& r = in.batch.agents[o];
          const Matrix v = nn::state_values(r.obs, me.theta);
          double m = 0.0;
          for (std::size_t t = 0; t < r.rows(); ++t) m += fr[o].w[t] * (v(t, 0) - fr[o].y[t]) * (v(t, 0) - fr[o].y[t]);
          s += cfg.value_coef * m / static_cast<double>(r.rows());
        }
        return s;
      };
      // The ratio surrogate and the weighted log-probability objective share
      // gradients but not values; the value is checked separately below.
      double lib_policy = 0.0;
      fold(shared_policy, compare(
                              me.phi.parameters(),
                              [&] {
                                lib_policy = algo::seac_shared_terms(ptrs, 0, in.batch, cfg).shared_policy;
                                return policy_oracle();
                              },
                              policy_oracle, opt.h));
      double expected_policy = 0.0;
      for (int o = 1; o < 3; ++o) {
        const auto& r = in.batch.agents[o];
        std::vector<double> wa(r.rows());
        for (std::size_t t = 0; t < wa.size(); ++t) wa[t] = fr[o].w[t] * fr[o].adv[t];
        expected_policy -= gather_mean(nn::policy_log_probs(r.obs, me.phi), r.actions, wa);
      }
      shared_policy.value_mismatch = std::max(shared_policy.value_mismatch, std::abs(lib_policy - expected_policy));
      fold(shared_value, compare(
                             me.theta.parameters(),
                             [&] { return cfg.value_coef * algo::seac_shared_terms(ptrs, 0, in.batch, cfg).shared_value; },
                             value_oracle, opt.h));
    }
    // DQN: target network and bootstrap are constants by construction.
    {
      Rng rng(derive_seed(opt.seed, 10 * k + 4));
      algo::QParams q = algo::init_q(derive_seed(opt.seed, 5000 + k), kObs, kActions, {}, opt.hidden);
      jitter(q.online, rng, 0.15);
      q.sync_target();
      jitter(q.online, rng, 0.05);
      algo::QBatch b;
      const int m = 8;
      b.obs = random_matrix(rng, m, kObs);
      b.next_obs = random_matrix(rng, m, kObs);
      for (int t = 0; t < m; ++t) {
        b.actions.push_back(static_cast<int>(uniform_below(rng, kActions)));
        b.rewards.push_back(uniform01(rng));
        b.terminal.push_back(uniform01(rng) < 0.3);
        b.source.push_back(0);
      }
      const Matrix qn = q.target.predict(b.next_obs);
      std::vector<double> y(m);
      for (int t = 0; t < m; ++t) y[t] = b.rewards[t] + (b.terminal[t] ? 0.0 : gamma * qn.row(t).maxCoeff());
      auto oracle = [&] {
        const Matrix qv = q.online.predict(b.obs);
        double s = 0.0;
        for (int t = 0; t < m; ++t) s += (qv(t, b.actions[t]) - y[t]) * (qv(t, b.actions[t]) - y[t]);
        return s / m;
      };
      fold(dqn, compare(
                    q.online.parameters(), [&] { return algo::dqn_loss(q, b, gamma); }, oracle, opt.h));
    }
  }
  return {policy, value, entropy, shared_policy, shared_value, dqn};
}

}  // namespace seac::testing
