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

#include "seac/gradcheck.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace seac::ad {

std::vector<Matrix> finite_difference_gradient(const std::function<double()>& f,
                                               std::span<Parameter* const> params, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: step must be > 0");
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (Parameter* p : params) {
    Matrix g(p->value.rows(), p->value.cols());
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      double& x = p->value.data()[i];
      const double saved = x;
      x = saved + h;
      const double up = f();
      x = saved - h;
      const double down = f();
      x = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NonFiniteError(
            fmt::format("finite_difference_gradient: non-finite value at {}[{}]", p->name, i));
      }
      g.data()[i] = (up - down) / (2.0 * h);
    }
    out.push_back(std::move(g));
  }
  return out;
}

double max_relative_error(std::span<const Matrix> analytic, std::span<const Matrix> numeric,
                          double floor) {
  if (analytic.size() != numeric.size()) {
    throw std::invalid_argument("max_relative_error: array count mismatch");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    if (shape_of(analytic[k]) != shape_of(numeric[k])) {
      throw ShapeError("max_relative_error",
                       std::array{shape_of(analytic[k]), shape_of(numeric[k])});
    }
    for (Eigen::Index i = 0; i < analytic[k].size(); ++i) {
      const double a = analytic[k].data()[i];
      const double n = numeric[k].data()[i];
      const double denom = std::max({std::abs(a), std::abs(n), floor});
      worst = std::max(worst, std::abs(a - n) / denom);
    }
  }
  return worst;
}

std::vector<Matrix> gradients_of(std::span<Parameter* const> params) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (const Parameter* p : params) out.push_back(p->grad);
  return out;
}

}  // namespace seac::ad
