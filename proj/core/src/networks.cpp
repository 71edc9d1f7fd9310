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

#include "seac/networks.hpp"

#include <Eigen/QR>
#include <fmt/format.h>

#include <array>
#include <cmath>
#include <stdexcept>

namespace seac::nn {

Mlp::Mlp(std::string prefix, std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  for (int s : sizes_) {
    if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be >= 1");
  }
  params_.reserve(2 * (sizes_.size() - 1));
  for (std::size_t k = 0; k + 1 < sizes_.size(); ++k) {
    params_.emplace_back(fmt::format("{}W{}", prefix, k), Matrix::Zero(sizes_[k], sizes_[k + 1]));
    params_.emplace_back(fmt::format("{}b{}", prefix, k), Matrix::Zero(1, sizes_[k + 1]));
  }
}

Mlp Mlp::orthogonal(std::string prefix, std::vector<int> layer_sizes, double output_gain,
                    Rng& rng) {
  Mlp net(std::move(prefix), std::move(layer_sizes));
  const std::size_t layers = net.layer_count();
  for (std::size_t k = 0; k < layers; ++k) {
    const double gain = (k + 1 == layers) ? output_gain : std::sqrt(2.0);
    net.weight(k).value = orthogonal_matrix(net.sizes_[k], net.sizes_[k + 1], gain, rng);
  }
  return net;
}

ad::Tensor Mlp::forward(ad::Tape& tape, ad::Tensor input) {
  ad::Tensor h = input;
  const std::size_t layers = layer_count();
  for (std::size_t k = 0; k < layers; ++k) {
    h = ad::add_row(ad::matmul(h, tape.parameter(weight(k))), tape.parameter(bias(k)));
    if (k + 1 < layers) h = ad::tanh(h);
  }
  return h;
}

Matrix Mlp::predict(const Matrix& input) const {
  if (input.cols() != input_dim()) {
    throw ad::ShapeError("Mlp::predict",
                         std::array{ad::shape_of(input), ad::Shape{input.rows(), input_dim()}});
  }
  Matrix h = input;
  const std::size_t layers = layer_count();
  for (std::size_t k = 0; k < layers; ++k) {
    Matrix z;
    z.noalias() = h * params_[2 * k].value;
    h = z.rowwise() + params_[2 * k + 1].value.row(0);
    if (k + 1 < layers) h = h.array().tanh().matrix();
  }
  return h;
}

ad::ParameterList Mlp::parameters() {
  ad::ParameterList out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(&p);
  return out;
}

Matrix orthogonal_matrix(int rows, int cols, double gain, Rng& rng) {
  const int tall = std::max(rows, cols);
  const int wide = std::min(rows, cols);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(tall, wide);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(tall, wide);
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < wide; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  Matrix w = rows >= cols ? q : Matrix(q.transpose());
  return gain * w;
}

ad::ParameterList AgentParams::parameters() {
  ad::ParameterList out = phi.parameters();
  for (ad::Parameter* p : theta.parameters()) out.push_back(p);
  return out;
}

void AgentParams::zero_grad() {
  for (auto& p : phi.params()) p.zero_grad();
  for (auto& p : theta.params()) p.zero_grad();
}

AgentParams init_agent(std::uint64_t seed, int obs_dim, int n_actions, ad::AdamConfig adam,
                       int agent_index, std::vector<int> hidden) {
  if (obs_dim < 1 || n_actions < 1) {
    throw std::invalid_argument("init_agent: obs_dim and n_actions must be >= 1");
  }
  Rng rng(seed);
  std::vector<int> actor_sizes{obs_dim};
  actor_sizes.insert(actor_sizes.end(), hidden.begin(), hidden.end());
  std::vector<int> critic_sizes = actor_sizes;
  actor_sizes.push_back(n_actions);
  critic_sizes.push_back(1);

  AgentParams a;
  a.agent_index = agent_index;
  a.phi = Mlp::orthogonal("phi.", std::move(actor_sizes), 0.01, rng);
  a.theta = Mlp::orthogonal("theta.", std::move(critic_sizes), 1.0, rng);
  a.adam_phi = ad::AdamState::for_params(a.phi.parameters(), adam);
  a.adam_theta = ad::AdamState::for_params(a.theta.parameters(), adam);
  return a;
}

CategoricalDist policy_forward(ad::Tape& tape, const Matrix& obs, Mlp& phi) {
  return {ad::log_softmax(phi.forward(tape, tape.constant(obs)))};
}

ad::Tensor value_forward(ad::Tape& tape, const Matrix& obs, Mlp& theta) {
  if (theta.output_dim() != 1) throw std::invalid_argument("value_forward: critic must have 1 output");
  return theta.forward(tape, tape.constant(obs));
}

ad::Tensor entropy(const CategoricalDist& dist) {
  ad::Tensor lp = dist.log_probs;
  return -1.0 * ad::row_sum(ad::exp(lp) * lp);
}

Matrix policy_log_probs(const Matrix& obs, const Mlp& phi) {
  return ad::log_softmax_rows(phi.predict(obs));
}

Matrix state_values(const Matrix& obs, const Mlp& theta) { return theta.predict(obs); }

Eigen::VectorXd entropy_rows(const Matrix& log_probs) {
  return -(log_probs.array().exp() * log_probs.array()).rowwise().sum().matrix();
}

ActionSample sample_action(std::span<const double> log_probs, Rng& rng) {
  const double u = uniform01(rng);
  double cdf = 0.0;
  int last_supported = -1;
  for (std::size_t a = 0; a < log_probs.size(); ++a) {
    const double p = std::exp(log_probs[a]);
    if (p <= 0.0) continue;
    last_supported = static_cast<int>(a);
    cdf += p;
    if (u < cdf) return {static_cast<int>(a), log_probs[a]};
  }
  if (last_supported < 0) throw std::invalid_argument("sample_action: empty support");
  return {last_supported, log_probs[static_cast<std::size_t>(last_supported)]};
}

}  // namespace seac::nn
