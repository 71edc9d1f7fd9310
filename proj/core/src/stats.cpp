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

#include "seac/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace seac::stats {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double mean(std::span<const double> x) {
  if (x.empty()) return kNaN;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  if (x.empty()) return kNaN;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) return kNaN;
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

double fraction_within(std::span<const double> x, double lo, double hi) {
  if (x.empty()) return kNaN;
  const auto n = std::count_if(x.begin(), x.end(), [&](double v) { return v >= lo && v <= hi; });
  return static_cast<double>(n) / static_cast<double>(x.size());
}

Histogram::Histogram(double width, double upper) : width_(width), upper_(upper) {
  if (!(width > 0.0) || !(upper > 0.0)) throw std::invalid_argument("Histogram: width and upper must be positive");
  counts_.assign(static_cast<std::size_t>(std::llround(upper / width)) + 1, 0);
}

void Histogram::add(double x) {
  std::size_t bin = counts_.size() - 1;
  if (x < upper_) bin = std::min(static_cast<std::size_t>(std::max(0.0, x) / width_), counts_.size() - 2);
  ++counts_[bin];
  ++total_;
}

double Histogram::lower(std::size_t bin) const { return static_cast<double>(bin) * width_; }

double Histogram::upper(std::size_t bin) const {
  return bin + 1 == counts_.size() ? std::numeric_limits<double>::infinity()
                                   : static_cast<double>(bin + 1) * width_;
}

double Histogram::median() const {
  if (total_ == 0) return kNaN;
  const std::uint64_t half = (total_ + 1) / 2;
  std::uint64_t seen = 0;
  for (std::size_t b = 0; b < counts_.size(); ++b) {
    seen += counts_[b];
    if (seen >= half) return b + 1 == counts_.size() ? upper_ : lower(b) + width_ / 2.0;
  }
  return upper_;
}

}  // namespace seac::stats
