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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "seac/algorithms.hpp"
#include "seac/gradcheck.hpp"
#include "seac/networks.hpp"
#include "seac/rng.hpp"

namespace seac::testing {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("seac_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline ad::Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  ad::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * (2.0 * uniform01(rng) - 1.0);
  return m;
}

/// Random aligned rollouts; actions and behaviour log-probs come from each
/// agent's current policy. Boundaries are sprinkled at random.
inline algo::RolloutBatch random_batch(Rng& rng, std::vector<nn::AgentParams>& agents, int n_envs, int n_steps) {
  algo::RolloutBatch b;
  b.n_envs = n_envs;
  b.n_steps = n_steps;
  const int rows = n_envs * n_steps;
  std::vector<algo::Boundary> bounds(rows, algo::Boundary::kNone);
  for (auto& x : bounds) {
    const double u = uniform01(rng);
    x = u < 0.15 ? algo::Boundary::kTerminal : (u < 0.25 ? algo::Boundary::kTruncated : algo::Boundary::kNone);
  }
  for (auto& ag : agents) {
    algo::AgentRollout r;
    r.obs = random_matrix(rng, rows, ag.obs_dim());
    r.next_obs = random_matrix(rng, rows, ag.obs_dim());
    const ad::Matrix lp = nn::policy_log_probs(r.obs, ag.phi);
    for (int row = 0; row < rows; ++row) {
      const auto s = nn::sample_action(nn::row_span(lp, row), rng);
      r.actions.push_back(s.action);
      r.behavior_log_probs.push_back(s.log_prob);
      r.rewards.push_back(uniform01(rng) < 0.3 ? uniform01(rng) : 0.0);
    }
    r.boundaries = bounds;
    b.agents.push_back(std::move(r));
  }
  return b;
}

inline std::vector<nn::AgentParams> make_agents(std::uint64_t seed, int n, int obs_dim, int n_actions,
                                                std::vector<int> hidden = {nn::kHiddenUnits, nn::kHiddenUnits}) {
  std::vector<nn::AgentParams> out;
  for (int i = 0; i < n; ++i) out.push_back(nn::init_agent(derive_seed(seed, i), obs_dim, n_actions, {}, i, hidden));
  return out;
}

/// Perturbs every weight so that policies and values are far from their
/// near-uniform initialisation.
inline void jitter(nn::Mlp& net, Rng& rng, double scale) {
  for (auto& p : net.params()) p.value += random_matrix(rng, p.value.rows(), p.value.cols(), scale);
}

inline std::vector<ad::Parameter*> as_list(nn::Mlp& a) { return a.parameters(); }

/// n-step targets by explicit forward summation, independent of the library
/// recursion. `next_v` holds V(next_obs) per row.
inline std::vector<double> reference_targets(const algo::AgentRollout& r, int n_envs, int n_steps,
                                             const std::vector<double>& next_v, double gamma) {
  std::vector<double> y(r.rows());
  for (int e = 0; e < n_envs; ++e) {
    for (int t = 0; t < n_steps; ++t) {
      double acc = 0.0;
      double disc = 1.0;
      for (int u = t; u < n_steps; ++u) {
        const int row = e * n_steps + u;
        acc += disc * r.rewards[row];
        disc *= gamma;
        if (r.boundaries[row] == algo::Boundary::kTerminal) break;
        if (r.boundaries[row] == algo::Boundary::kTruncated || u + 1 == n_steps) {
          acc += disc * next_v[row];
          break;
        }
      }
      y[e * n_steps + t] = acc;
    }
  }
  return y;
}

inline std::vector<double> column(const ad::Matrix& m) { return {m.data(), m.data() + m.rows()}; }

}  // namespace seac::testing
