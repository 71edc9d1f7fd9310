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

#include <functional>
#include <span>
#include <vector>

#include "seac/tensor.hpp"

namespace seac::ad {

/// Central-difference estimate (f(p + h e) - f(p - h e)) / 2h for every
/// coordinate of every parameter. Parameters are perturbed in place and
/// restored bit-exactly. Throws NonFiniteError if any evaluation is not finite.
std::vector<Matrix> finite_difference_gradient(const std::function<double()>& f,
                                               std::span<Parameter* const> params,
                                               double h = 1e-5);

/// Elementwise |a - b| / max(|a|, |b|, floor), maximised over all entries.
/// `floor` keeps near-zero entries from dominating; they are then compared on
/// absolute error scaled by 1 / floor.
double max_relative_error(std::span<const Matrix> analytic, std::span<const Matrix> numeric,
                          double floor = 1e-6);

/// Copies of the current Parameter::grad arrays.
std::vector<Matrix> gradients_of(std::span<Parameter* const> params);

}  // namespace seac::ad
