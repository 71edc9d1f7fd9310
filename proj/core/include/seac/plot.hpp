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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace seac::plot {

/// Numeric columns of one metrics.csv, keyed by header name.
struct MetricsTable {
  std::vector<std::string> columns;
  std::map<std::string, std::vector<double>> values;

  std::size_t rows() const;
  const std::vector<double>& column(const std::string& name) const;
};

/// Reads a metrics file, skipping '#' comment lines; "nan" cells become NaN.
MetricsTable read_metrics(const std::filesystem::path& path);

/// Runs sharing one curve (typically several seeds of one config).
struct RunGroup {
  std::string label;
  std::vector<std::filesystem::path> metrics_files;
};

/// Mean and population standard deviation across runs at every step present
/// in all of them.
struct Curve {
  std::vector<double> step;
  std::vector<double> mean;
  std::vector<double> std;
};

Curve aggregate(const std::vector<MetricsTable>& runs, const std::string& metric);

/// Self-contained SVG: per group, one shaded band (class "std") between
/// mean - std and mean + std and one line (class "mean").
std::string render_svg(const std::string& metric, const std::vector<std::string>& labels,
                       const std::vector<Curve>& curves);

/// Writes <out_dir>/<metric>.svg for each requested metric (every metric with
/// at least one finite value when `metrics` is empty). Returns written paths.
std::vector<std::filesystem::path> plot_groups(const std::vector<RunGroup>& groups,
                                               const std::filesystem::path& out_dir,
                                               const std::vector<std::string>& metrics = {});

}  // namespace seac::plot
