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

namespace seac::stats {

double mean(std::span<const double> x);
/// Population standard deviation (divides by n).
double stddev(std::span<const double> x);
/// Linear-interpolated quantile, q in [0, 1]; NaN for empty input.
double quantile(std::vector<double> x, double q);
/// Fraction of values in [lo, hi].
double fraction_within(std::span<const double> x, double lo, double hi);

/// Fixed-width histogram over [0, upper) plus one overflow bin.
class Histogram {
 public:
  Histogram(double width, double upper);

  void add(double x);
  std::size_t bins() const { return counts_.size(); }
  double lower(std::size_t bin) const;
  double upper(std::size_t bin) const;
  std::uint64_t count(std::size_t bin) const { return counts_[bin]; }
  std::uint64_t total() const { return total_; }
  /// Midpoint of the bin holding the median (upper edge for the overflow bin).
  double median() const;

 private:
  double width_;
  double upper_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

}  // namespace seac::stats
