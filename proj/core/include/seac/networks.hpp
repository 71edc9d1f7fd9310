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
#include <string>
#include <utility>
#include <vector>

#include "seac/optim.hpp"
#include "seac/rng.hpp"
#include "seac/tensor.hpp"

namespace seac::nn {

using ad::Matrix;

/// Fully connected network with tanh between layers and a linear head.
/// Parameters are stored as W0, b0, W1, b1, ... with Wk of shape in x out so
/// that a forward pass is x * W + b on row batches.
class Mlp {
 public:
  Mlp() = default;
  /// All weights and biases zero.
  Mlp(std::string prefix, std::vector<int> layer_sizes);

  /// Orthogonal weights (gain sqrt(2) on hidden layers, `output_gain` on the
  /// head) and zero biases.
  static Mlp orthogonal(std::string prefix, std::vector<int> layer_sizes, double output_gain,
                        Rng& rng);

  ad::Tensor forward(ad::Tape& tape, ad::Tensor input);
  Matrix predict(const Matrix& input) const;

  ad::ParameterList parameters();
  std::vector<ad::Parameter>& params() { return params_; }
  const std::vector<ad::Parameter>& params() const { return params_; }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  std::size_t layer_count() const { return sizes_.size() - 1; }

  ad::Parameter& weight(std::size_t layer) { return params_[2 * layer]; }
  ad::Parameter& bias(std::size_t layer) { return params_[2 * layer + 1]; }

 private:
  std::vector<int> sizes_;
  std::vector<ad::Parameter> params_;
};

/// Weight matrix of shape rows x cols with orthonormal columns (or rows),
/// scaled by `gain`.
Matrix orthogonal_matrix(int rows, int cols, double gain, Rng& rng);

inline constexpr int kHiddenUnits = 64;

/// Actor (phi) and critic (theta) of one agent with their optimiser state.
struct AgentParams {
  int agent_index = 0;
  Mlp phi;
  Mlp theta;
  ad::AdamState adam_phi;
  ad::AdamState adam_theta;

  int obs_dim() const { return phi.input_dim(); }
  int n_actions() const { return phi.output_dim(); }
  ad::ParameterList parameters();
  void zero_grad();
};

AgentParams init_agent(std::uint64_t seed, int obs_dim, int n_actions,
                       ad::AdamConfig adam = {}, int agent_index = 0,
                       std::vector<int> hidden = {kHiddenUnits, kHiddenUnits});

/// Per-row categorical distribution held as normalised log-probabilities.
struct CategoricalDist {
  ad::Tensor log_probs;  // n x n_actions
};

CategoricalDist policy_forward(ad::Tape& tape, const Matrix& obs, Mlp& phi);
/// n x 1 state values.
ad::Tensor value_forward(ad::Tape& tape, const Matrix& obs, Mlp& theta);
/// Per-row entropy -sum_a p_a log p_a, n x 1.
ad::Tensor entropy(const CategoricalDist& dist);

/// Tape-free forward passes with the same arithmetic.
Matrix policy_log_probs(const Matrix& obs, const Mlp& phi);
Matrix state_values(const Matrix& obs, const Mlp& theta);
Eigen::VectorXd entropy_rows(const Matrix& log_probs);

struct ActionSample {
  int action = 0;
  double log_prob = 0.0;
};

/// Inverse-CDF draw: one uniform01() from `rng`, then the first action whose
/// cumulative probability exceeds it. Zero-probability actions are never chosen.
ActionSample sample_action(std::span<const double> log_probs, Rng& rng);

inline std::span<const double> row_span(const Matrix& m, Eigen::Index row) {
  return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace seac::nn
