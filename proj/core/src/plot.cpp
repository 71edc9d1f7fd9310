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

#include "seac/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace seac::plot {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, sep);) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_cell(const std::string& s) {
  if (s.empty() || s == "nan") return kNaN;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    return used == s.size() ? v : kNaN;
  } catch (const std::exception&) {
    return kNaN;
  }
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::size_t MetricsTable::rows() const { return values.empty() ? 0 : values.begin()->second.size(); }

const std::vector<double>& MetricsTable::column(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw std::invalid_argument(fmt::format("metrics file has no column '{}'", name));
  return it->second;
}

MetricsTable read_metrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  MetricsTable t;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (t.columns.empty()) {
      t.columns = cells;
      for (const auto& c : cells) t.values[c];
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw std::runtime_error(fmt::format("{}: row has {} cells, header has {}", path.string(), cells.size(),
                                           t.columns.size()));
    }
    for (std::size_t k = 0; k < cells.size(); ++k) t.values[t.columns[k]].push_back(parse_cell(cells[k]));
  }
  if (t.columns.empty()) throw std::runtime_error(path.string() + ": no header");
  return t;
}

Curve aggregate(const std::vector<MetricsTable>& runs, const std::string& metric) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  std::set<double> common(runs[0].column("step").begin(), runs[0].column("step").end());
  for (std::size_t r = 1; r < runs.size(); ++r) {
    const auto& s = runs[r].column("step");
    std::set<double> here(s.begin(), s.end());
    std::set<double> both;
    std::set_intersection(common.begin(), common.end(), here.begin(), here.end(), std::inserter(both, both.end()));
    common = std::move(both);
  }
  Curve c;
  for (double step : common) {
    std::vector<double> vals;
    for (const auto& run : runs) {
      const auto& steps = run.column("step");
      const auto idx = static_cast<std::size_t>(std::find(steps.begin(), steps.end(), step) - steps.begin());
      const double v = run.column(metric)[idx];
      if (std::isfinite(v)) vals.push_back(v);
    }
    if (vals.empty()) continue;
    double m = 0.0;
    for (double v : vals) m += v;
    m /= static_cast<double>(vals.size());
    double ss = 0.0;
    for (double v : vals) ss += (v - m) * (v - m);
    c.step.push_back(step);
    c.mean.push_back(m);
    c.std.push_back(std::sqrt(ss / static_cast<double>(vals.size())));
  }
  return c;
}

std::string render_svg(const std::string& metric, const std::vector<std::string>& labels,
                       const std::vector<Curve>& curves) {
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Curve& c : curves) {
    for (std::size_t k = 0; k < c.step.size(); ++k) {
      x0 = std::min(x0, c.step[k]);
      x1 = std::max(x1, c.step[k]);
      y0 = std::min(y0, c.mean[k] - c.std[k]);
      y1 = std::max(y1, c.mean[k] + c.std[k]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y0 -= 0.5, y1 += 0.5;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n"
      "<text x=\"{2}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{3}</text>\n",
      W, H, W / 2, escape(metric));
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000\"/>\n", L, H - B, W - R);
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000\"/>\n", L, T, H - B);
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    s += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{:.4g}</text>\n",
        px(xv), H - B + 16, xv);
    s += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{:.3g}</text>\n",
        L - 6, py(yv) + 4, yv);
  }
  s += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">environment steps</text>\n",
      (L + W - R) / 2, H - 12);

  for (std::size_t g = 0; g < curves.size(); ++g) {
    const Curve& c = curves[g];
    const char* color = kPalette[g % std::size(kPalette)];
    std::string band, line;
    for (std::size_t k = 0; k < c.step.size(); ++k) {
      band += fmt::format("{:.2f},{:.2f} ", px(c.step[k]), py(c.mean[k] + c.std[k]));
      line += fmt::format("{:.2f},{:.2f} ", px(c.step[k]), py(c.mean[k]));
    }
    for (std::size_t k = c.step.size(); k-- > 0;) {
      band += fmt::format("{:.2f},{:.2f} ", px(c.step[k]), py(c.mean[k] - c.std[k]));
    }
    s += fmt::format("<polygon class=\"std\" points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n", band,
                     color);
    s += fmt::format("<polyline class=\"mean\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", line,
                     color);
    const std::string label = g < labels.size() ? labels[g] : fmt::format("group {}", g);
    s += fmt::format(
        "<text class=\"legend\" x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{}\">{}</text>\n",
        L + 10, T + 14 + 16 * static_cast<double>(g), color, escape(label));
  }
  s += "</svg>\n";
  return s;
}

std::vector<fs::path> plot_groups(const std::vector<RunGroup>& groups, const fs::path& out_dir,
                                  const std::vector<std::string>& metrics) {
  if (groups.empty()) throw std::invalid_argument("plot: no runs given");
  std::vector<std::vector<MetricsTable>> tables;
  std::vector<std::string> labels;
  for (const RunGroup& g : groups) {
    if (g.metrics_files.empty()) throw std::invalid_argument(fmt::format("plot: group '{}' has no runs", g.label));
    std::vector<MetricsTable> runs;
    for (const auto& p : g.metrics_files) runs.push_back(read_metrics(p));
    tables.push_back(std::move(runs));
    labels.push_back(g.label);
  }
  std::vector<std::string> wanted = metrics;
  if (wanted.empty()) {
    for (const auto& col : tables[0][0].columns) {
      if (col == "step" || col == "updates" || col == "episodes") continue;
      const auto& v = tables[0][0].column(col);
      if (std::any_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) wanted.push_back(col);
    }
  }
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (const auto& metric : wanted) {
    std::vector<Curve> curves;
    for (const auto& runs : tables) curves.push_back(aggregate(runs, metric));
    const fs::path p = out_dir / (metric + ".svg");
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << render_svg(metric, labels, curves);
    written.push_back(p);
  }
  return written;
}

}  // namespace seac::plot
