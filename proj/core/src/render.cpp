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

// Text and SVG renderers for the grid worlds. Glyph tables are listed in
// docs/rendering.md.

#include <fmt/format.h>

#include "seac/lbf.hpp"
#include "seac/rware.hpp"

namespace seac::envs {

namespace {

constexpr int kCellPx = 24;

std::string svg_open(int rows, int cols) {
  const int w = cols * kCellPx;
  const int h = rows * kCellPx;
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
      w, h);
}

std::string svg_rect(Cell c, const char* fill, int inset = 0) {
  return fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", c.col * kCellPx + inset,
                     c.row * kCellPx + inset, kCellPx - 2 * inset, kCellPx - 2 * inset, fill);
}

std::string svg_label(Cell c, const std::string& text, const char* fill = "#000000") {
  return fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\" "
      "fill=\"{}\">{}</text>\n",
      c.col * kCellPx + kCellPx / 2, c.row * kCellPx + kCellPx / 2 + 5, fill, text);
}

std::string svg_grid(int rows, int cols) {
  std::string out;
  for (int r = 0; r <= rows; ++r) {
    out += fmt::format("<line x1=\"0\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#cccccc\"/>\n", r * kCellPx,
                       cols * kCellPx);
  }
  for (int c = 0; c <= cols; ++c) {
    out += fmt::format("<line x1=\"{0}\" y1=\"0\" x2=\"{0}\" y2=\"{1}\" stroke=\"#cccccc\"/>\n", c * kCellPx,
                       rows * kCellPx);
  }
  return out;
}

char food_glyph(int level) { return level >= 10 ? '*' : static_cast<char>('0' + level); }

}  // namespace

std::string LbfEnv::render_text() const {
  const LbfState& s = state_;
  std::vector<std::string> grid(s.rows, std::string(s.cols, '.'));
  for (const LbfFood& f : s.foods) {
    if (!f.collected) grid[f.pos.row][f.pos.col] = food_glyph(f.level);
  }
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    grid[s.agents[i].pos.row][s.agents[i].pos.col] = static_cast<char>('A' + i % 26);
  }
  std::string out;
  for (const std::string& line : grid) out += line + '\n';
  return out;
}

std::string LbfEnv::render_svg() const {
  const LbfState& s = state_;
  std::string out = svg_open(s.rows, s.cols) + svg_grid(s.rows, s.cols);
  for (const LbfFood& f : s.foods) {
    if (f.collected) continue;
    out += svg_rect(f.pos, "#e9c46a", 3);
    out += svg_label(f.pos, std::string(1, food_glyph(f.level)));
  }
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    out += svg_rect(s.agents[i].pos, "#2a9d8f", 3);
    out += svg_label(s.agents[i].pos, fmt::format("{}{}", static_cast<char>('A' + i % 26), s.agents[i].level),
                     "#ffffff");
  }
  out += "</svg>\n";
  return out;
}

std::string RwareEnv::render_text() const {
  const RwareLayout& l = layout_;
  std::vector<std::string> grid(l.rows, std::string(l.cols, '.'));
  for (int r = 0; r < l.rows; ++r) {
    for (int c = 0; c < l.cols; ++c) {
      if (!l.is_corridor({r, c})) grid[r][c] = '_';
    }
  }
  for (Cell g : l.goals) grid[g.row][g.col] = 'G';
  for (std::size_t k = 0; k < state_.shelves.size(); ++k) {
    const int id = static_cast<int>(k);
    if (state_.shelf_carried(id)) continue;
    const Cell p = state_.shelves[k].pos;
    grid[p.row][p.col] = state_.requested(id) ? '$' : '#';
  }
  static constexpr char kFree[] = {'^', '>', 'v', '<'};
  static constexpr char kLoaded[] = {'N', 'E', 'S', 'W'};
  for (const RwareAgent& a : state_.agents) {
    const int h = static_cast<int>(a.heading);
    grid[a.pos.row][a.pos.col] = a.carrying >= 0 ? kLoaded[h] : kFree[h];
  }
  std::string out;
  for (const std::string& line : grid) out += line + '\n';
  return out;
}

std::string RwareEnv::render_svg() const {
  const RwareLayout& l = layout_;
  std::string out = svg_open(l.rows, l.cols);
  for (int r = 0; r < l.rows; ++r) {
    for (int c = 0; c < l.cols; ++c) {
      if (!l.is_corridor({r, c})) out += svg_rect({r, c}, "#eeeeee");
    }
  }
  for (Cell g : l.goals) out += svg_rect(g, "#264653");
  out += svg_grid(l.rows, l.cols);
  for (std::size_t k = 0; k < state_.shelves.size(); ++k) {
    const int id = static_cast<int>(k);
    out += svg_rect(state_.shelves[k].pos, state_.requested(id) ? "#e76f51" : "#8d99ae", 4);
  }
  static constexpr const char* kArrow[] = {"&#8593;", "&#8594;", "&#8595;", "&#8592;"};
  for (std::size_t i = 0; i < state_.agents.size(); ++i) {
    const RwareAgent& a = state_.agents[i];
    out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>\n", a.pos.col * kCellPx + kCellPx / 2,
                       a.pos.row * kCellPx + kCellPx / 2, kCellPx / 3, a.carrying >= 0 ? "#f4a261" : "#2a9d8f");
    out += svg_label(a.pos, kArrow[static_cast<int>(a.heading)], "#ffffff");
  }
  out += "</svg>\n";
  return out;
}

}  // namespace seac::envs
