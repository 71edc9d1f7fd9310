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
#include <vector>

#include "seac/tensor.hpp"

namespace seac::ad {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-3;
};

/// First/second moment estimates for a fixed list of parameters.
struct AdamState {
  AdamConfig config;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::uint64_t step = 0;

  static AdamState for_params(std::span<Parameter* const> params, AdamConfig config = {});
};

/// Bias-corrected Adam step. Gradients are left in place; callers zero them.
/// Throws std::invalid_argument when a parameter's shape drifted from the
/// moment arrays.
void adam_update(std::span<Parameter* const> params, AdamState& state);

/// Rescales all gradients so that their joint L2 norm is at most `max_norm`.
/// Returns the norm measured before clipping.
double clip_grad_norm(std::span<Parameter* const> params, double max_norm);

}  // namespace seac::ad
