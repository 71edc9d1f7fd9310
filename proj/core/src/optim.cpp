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

#include "seac/optim.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace seac::ad {

AdamState AdamState::for_params(std::span<Parameter* const> params, AdamConfig config) {
  AdamState s;
  s.config = config;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const Parameter* p : params) {
    s.m.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    s.v.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
  return s;
}

void adam_update(std::span<Parameter* const> params, AdamState& state) {
  if (params.size() != state.m.size() || params.size() != state.v.size()) {
    throw std::invalid_argument(fmt::format("adam_update: {} parameters but state tracks {}",
                                            params.size(), state.m.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Shape ps = params[i]->shape();
    if (ps != shape_of(state.m[i]) || ps != shape_of(state.v[i]) ||
        ps != shape_of(params[i]->grad)) {
      throw std::invalid_argument(fmt::format("adam_update: parameter '{}' is {} but state is {}",
                                              params[i]->name, ps.str(),
                                              shape_of(state.m[i]).str()));
    }
  }

  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  const double step_size = c.lr / bias1;
  const double sqrt_bias2 = std::sqrt(bias2);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    Matrix& m = state.m[i];
    Matrix& v = state.v[i];
    m = c.beta1 * m + (1.0 - c.beta1) * p.grad;
    v = c.beta2 * v + (1.0 - c.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= step_size * m.array() / (v.array().sqrt() / sqrt_bias2 + c.eps);
  }
}

double clip_grad_norm(std::span<Parameter* const> params, double max_norm) {
  double sq = 0.0;
  for (const Parameter* p : params) sq += p->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  const double coef = max_norm / (norm + 1e-6);
  if (coef < 1.0) {
    for (Parameter* p : params) p->grad *= coef;
  }
  return norm;
}

}  // namespace seac::ad
