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

#include <array>
#include <cmath>

#include "fixtures.hpp"
#include "seac/checkpoint.hpp"
#include "seac/networks.hpp"

namespace seac {
namespace {

using ad::Matrix;

bool same_params(const nn::Mlp& a, const nn::Mlp& b) {
  if (a.params().size() != b.params().size()) return false;
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    if (a.params()[i].value != b.params()[i].value) return false;
  }
  return true;
}

TEST(InitAgent, Deterministic) {
  const auto a = nn::init_agent(7, 4, 5);
  const auto b = nn::init_agent(7, 4, 5);
  EXPECT_TRUE(same_params(a.phi, b.phi));
  EXPECT_TRUE(same_params(a.theta, b.theta));
  const auto c = nn::init_agent(8, 4, 5);
  EXPECT_FALSE(same_params(a.phi, c.phi));
}

TEST(InitAgent, ShapesAndZeroBiases) {
  const auto a = nn::init_agent(1, 6, 5);
  EXPECT_EQ(a.phi.layer_sizes(), (std::vector<int>{6, 64, 64, 5}));
  EXPECT_EQ(a.theta.layer_sizes(), (std::vector<int>{6, 64, 64, 1}));
  for (const auto& p : a.phi.params()) {
    if (p.name.find(".b") != std::string::npos) EXPECT_TRUE(p.value.isZero()) << p.name;
  }
}

TEST(InitAgent, OrthogonalColumnsWithGain) {
  Rng rng(3);
  const Matrix w = nn::orthogonal_matrix(64, 5, 0.01, rng);
  EXPECT_TRUE((w.transpose() * w).isApprox(1e-4 * Matrix::Identity(5, 5), 1e-12));
  const Matrix h = nn::orthogonal_matrix(6, 64, std::sqrt(2.0), rng);
  EXPECT_TRUE((h * h.transpose()).isApprox(2.0 * Matrix::Identity(6, 6), 1e-12));
}

TEST(InitAgent, InitialPolicyNearUniform) {
  Rng rng(9);
  const auto a = nn::init_agent(11, 10, 5);
  const Matrix obs = testing::random_matrix(rng, 200, 10);
  const Matrix p = nn::policy_log_probs(obs, a.phi).array().exp();
  EXPECT_LT((p.array() - 0.2).abs().maxCoeff(), 0.05);
}

TEST(PolicyForward, ZeroWeightsUniform) {
  nn::Mlp phi("phi.", {3, 8, 4});
  Rng rng(1);
  ad::Tape tape;
  const auto d = nn::policy_forward(tape, testing::random_matrix(rng, 5, 3), phi);
  EXPECT_TRUE(d.log_probs.value().isApprox(Matrix::Constant(5, 4, -std::log(4.0))));
}

TEST(PolicyForward, IdenticalRowsIdenticalOutputs) {
  const auto a = nn::init_agent(2, 3, 4);
  Matrix obs(3, 3);
  obs.rowwise() = Eigen::RowVector3d(0.1, -0.7, 0.4);
  const Matrix lp = nn::policy_log_probs(obs, a.phi);
  EXPECT_EQ(lp.row(0), lp.row(1));
  EXPECT_EQ(lp.row(0), lp.row(2));
  const Matrix v = nn::state_values(obs, a.theta);
  EXPECT_EQ(v(0, 0), v(2, 0));
}

TEST(PolicyForward, TapedAndPlainAgree) {
  Rng rng(4);
  auto a = nn::init_agent(3, 7, 5);
  testing::jitter(a.phi, rng, 0.3);
  const Matrix obs = testing::random_matrix(rng, 9, 7);
  ad::Tape tape;
  EXPECT_EQ(nn::policy_forward(tape, obs, a.phi).log_probs.value(), nn::policy_log_probs(obs, a.phi));
  EXPECT_EQ(nn::value_forward(tape, obs, a.theta).value(), nn::state_values(obs, a.theta));
}

TEST(ValueForward, ZeroFinalLayer) {
  auto a = nn::init_agent(3, 4, 5);
  a.theta.weight(2).value.setZero();
  Rng rng(1);
  EXPECT_TRUE(nn::state_values(testing::random_matrix(rng, 6, 4), a.theta).isZero());
}

TEST(ValueForward, RejectsWideCritic) {
  nn::Mlp theta("theta.", {3, 2});
  ad::Tape tape;
  EXPECT_THROW(nn::value_forward(tape, Matrix::Zero(1, 3), theta), std::invalid_argument);
}

TEST(Predict, WrongWidthThrows) {
  const auto a = nn::init_agent(3, 4, 5);
  EXPECT_THROW(nn::policy_log_probs(Matrix::Zero(2, 5), a.phi), ad::ShapeError);
}

TEST(Gradients, LogProbMatchesFiniteDifferences) {
  Rng rng(12);
  auto a = nn::init_agent(5, 6, 5, {}, 0, {16, 16});
  testing::jitter(a.phi, rng, 0.2);
  const Matrix obs = testing::random_matrix(rng, 4, 6);
  const std::vector<int> act{0, 3, 4, 1};
  auto params = a.phi.parameters();
  ad::zero_grad(params);
  ad::Tape tape;
  tape.backpropagate(ad::sum(ad::gather(nn::policy_forward(tape, obs, a.phi).log_probs, act)));
  const auto analytic = ad::gradients_of(params);
  const auto numeric = ad::finite_difference_gradient(
      [&] {
        const Matrix lp = nn::policy_log_probs(obs, a.phi);
        double s = 0.0;
        for (int r = 0; r < 4; ++r) s += lp(r, act[r]);
        return s;
      },
      params);
  EXPECT_LT(ad::max_relative_error(analytic, numeric), 1e-4);
}

TEST(Gradients, ValueMatchesFiniteDifferences) {
  Rng rng(13);
  auto a = nn::init_agent(6, 5, 3, {}, 0, {16, 16});
  const Matrix obs = testing::random_matrix(rng, 6, 5);
  auto params = a.theta.parameters();
  ad::zero_grad(params);
  ad::Tape tape;
  tape.backpropagate(ad::sum(ad::tanh(nn::value_forward(tape, obs, a.theta))));
  const auto analytic = ad::gradients_of(params);
  const auto numeric = ad::finite_difference_gradient(
      [&] { return nn::state_values(obs, a.theta).array().tanh().sum(); }, params);
  EXPECT_LT(ad::max_relative_error(analytic, numeric), 1e-4);
}

TEST(Entropy, UniformAndDeterministic) {
  ad::Tape tape;
  const auto u = nn::entropy({ad::log_softmax(tape.constant(Matrix::Zero(2, 5)))});
  EXPECT_NEAR(u.value()(0, 0), std::log(5.0), 1e-15);
  Matrix peaked = Matrix::Constant(1, 3, -800.0);
  peaked(0, 1) = 0.0;
  EXPECT_EQ(nn::entropy({ad::log_softmax(tape.constant(peaked))}).value()(0, 0), 0.0);
}

TEST(Entropy, MatchesFiniteDifferences) {
  Rng rng(14);
  auto a = nn::init_agent(7, 4, 5, {}, 0, {16, 16});
  testing::jitter(a.phi, rng, 0.3);
  const Matrix obs = testing::random_matrix(rng, 5, 4);
  auto params = a.phi.parameters();
  ad::zero_grad(params);
  ad::Tape tape;
  tape.backpropagate(ad::mean(nn::entropy(nn::policy_forward(tape, obs, a.phi))));
  const auto analytic = ad::gradients_of(params);
  const auto numeric = ad::finite_difference_gradient(
      [&] { return nn::entropy_rows(nn::policy_log_probs(obs, a.phi)).mean(); }, params);
  EXPECT_LT(ad::max_relative_error(analytic, numeric), 1e-4);
}

TEST(SampleAction, OneHotAlwaysSameAction) {
  Rng rng(1);
  const std::vector<double> lp{-1000.0, 0.0, -INFINITY};
  for (int i = 0; i < 1000; ++i) {
    const auto s = nn::sample_action(lp, rng);
    EXPECT_EQ(s.action, 1);
    EXPECT_EQ(s.log_prob, 0.0);
  }
}

TEST(SampleAction, UniformFrequencies) {
  Rng rng(2024);
  const std::vector<double> lp(4, -std::log(4.0));
  std::array<int, 4> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[nn::sample_action(lp, rng).action];
  const double sd = std::sqrt(n * 0.25 * 0.75);
  for (int c : counts) EXPECT_LT(std::abs(c - n * 0.25), 4.0 * sd);
}

TEST(SampleAction, SeedDeterminesSequence) {
  const std::vector<double> lp{std::log(0.1), std::log(0.2), std::log(0.7)};
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(nn::sample_action(lp, a).action, nn::sample_action(lp, b).action);
}

TEST(Checkpoint, AgentRoundTripIsByteIdentical) {
  Rng rng(1);
  auto a = nn::init_agent(3, 6, 5);
  testing::jitter(a.phi, rng, 0.1);
  a.adam_phi.step = 17;
  a.adam_phi.m[0](0, 0) = 0.25;
  Checkpoint ck;
  ck.config_hash = 0xdeadbeef;
  ck.sections.push_back(agent_section(a));
  const std::string bytes = encode_checkpoint(ck);
  auto b = nn::init_agent(99, 6, 5);
  restore_agent(decode_checkpoint(bytes).sections.at(0), b);
  EXPECT_TRUE(same_params(a.phi, b.phi));
  EXPECT_EQ(b.adam_phi.step, 17u);
  Checkpoint again;
  again.config_hash = 0xdeadbeef;
  again.sections.push_back(agent_section(b));
  EXPECT_EQ(encode_checkpoint(again), bytes);
}

TEST(Checkpoint, ShapeMismatchAndCorruption) {
  const auto a = nn::init_agent(3, 6, 5);
  Checkpoint ck;
  ck.sections.push_back(agent_section(a));
  auto wrong = nn::init_agent(3, 7, 5);
  EXPECT_THROW(restore_agent(ck.sections[0], wrong), CheckpointError);
  std::string bytes = encode_checkpoint(ck);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() / 2)), CheckpointError);
  bytes[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bytes), CheckpointError);
}

}  // namespace
}  // namespace seac
