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

#include "seac/env.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <regex>

#include "seac/lbf.hpp"
#include "seac/rware.hpp"
#include "seac/symgame.hpp"

namespace seac::envs {

std::string_view to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kLbf: return "lbf";
    case EnvKind::kRware: return "rware";
    case EnvKind::kSymGame: return "symgame";
  }
  return "unknown";
}

EnvKind parse_env_kind(std::string_view text) {
  if (text == "lbf") return EnvKind::kLbf;
  if (text == "rware") return EnvKind::kRware;
  if (text == "symgame") return EnvKind::kSymGame;
  throw std::invalid_argument(fmt::format("unknown environment kind '{}'", text));
}

std::string_view to_string(RwareSize size) {
  return size == RwareSize::kTiny ? "tiny" : "small";
}

RwareSize parse_rware_size(std::string_view text) {
  if (text == "tiny") return RwareSize::kTiny;
  if (text == "small") return RwareSize::kSmall;
  throw std::invalid_argument(fmt::format("unknown warehouse size '{}'", text));
}

void EnvSpec::validate() const {
  if (n_agents < 1) throw std::invalid_argument("env: n_agents must be >= 1");
  if (rows < 1 || cols < 1) throw std::invalid_argument("env: grid dimensions must be positive");
  if (max_episode_steps < 1) throw std::invalid_argument("env: max_episode_steps must be >= 1");
  switch (kind) {
    case EnvKind::kLbf:
      if (n_food < 1) throw std::invalid_argument("lbf: n_food must be >= 1");
      if (max_agent_level < 1) throw std::invalid_argument("lbf: max_agent_level must be >= 1");
      break;
    case EnvKind::kRware:
      if (n_requests < 1) throw std::invalid_argument("rware: n_requests must be >= 1");
      break;
    case EnvKind::kSymGame:
      if (n_agents != 2) throw std::invalid_argument("symgame: exactly two agents");
      break;
  }
}

std::string EnvSpec::describe() const {
  switch (kind) {
    case EnvKind::kLbf:
      return fmt::format("lbf-{}x{}-{}p-{}f{}", rows, cols, n_agents, n_food,
                         cooperative ? "-coop" : "");
    case EnvKind::kRware:
      return fmt::format("rware-{}-{}ag-r{}", to_string(rware_size), n_agents, n_requests);
    case EnvKind::kSymGame:
      return "symgame-canonical";
  }
  return "unknown";
}

EnvSpec preset(std::string_view name) {
  static const std::regex lbf_re(R"(lbf-(\d+)x(\d+)-(\d+)p-(\d+)f(-coop)?)");
  static const std::regex rware_re(R"(rware-(tiny|small)-(\d+)ag(-hard)?)");
  const std::string text(name);
  std::smatch m;
  EnvSpec spec;
  if (std::regex_match(text, m, lbf_re)) {
    spec.kind = EnvKind::kLbf;
    spec.rows = std::stoi(m[1]);
    spec.cols = std::stoi(m[2]);
    spec.n_agents = std::stoi(m[3]);
    spec.n_food = std::stoi(m[4]);
    spec.cooperative = m[5].matched;
    spec.max_episode_steps = 25;
  } else if (std::regex_match(text, m, rware_re)) {
    spec.kind = EnvKind::kRware;
    spec.rware_size = parse_rware_size(m[1].str());
    spec.n_agents = std::stoi(m[2]);
    const auto dims = rware_grid_dims(spec.rware_size);
    spec.rows = dims.first;
    spec.cols = dims.second;
    spec.max_episode_steps = 500;
    spec.n_requests = m[3].matched ? std::max(1, spec.n_agents / 2) : spec.n_agents;
  } else if (text == "symgame" || text == "symgame-canonical") {
    spec.kind = EnvKind::kSymGame;
    spec.n_agents = 2;
    spec.rows = 1;
    spec.cols = 4;
    spec.max_episode_steps = 25;
  } else {
    throw std::invalid_argument(fmt::format("unknown environment preset '{}'", name));
  }
  spec.validate();
  return spec;
}

std::vector<std::string> preset_names() {
  return {"lbf-12x12-2p-1f",  "lbf-10x10-3p-3f",     "lbf-15x15-3p-4f",
          "lbf-8x8-2p-2f-coop", "rware-tiny-2ag",    "rware-tiny-2ag-hard",
          "rware-tiny-4ag",   "rware-small-4ag",     "symgame-canonical"};
}

void Environment::check_actions(std::span<const int> actions) const {
  if (static_cast<int>(actions.size()) != n_agents()) {
    throw std::out_of_range(
        fmt::format("expected {} actions, got {}", n_agents(), actions.size()));
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= n_actions()) {
      throw std::out_of_range(fmt::format("agent {}: action {} out of range [0, {})", i,
                                          actions[i], n_actions()));
    }
  }
}

std::unique_ptr<Environment> make_env(const EnvSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case EnvKind::kLbf: return std::make_unique<LbfEnv>(spec);
    case EnvKind::kRware: return std::make_unique<RwareEnv>(spec);
    case EnvKind::kSymGame: return std::make_unique<SymGameEnv>(spec, canonical_game());
  }
  throw std::invalid_argument("make_env: unknown kind");
}

}  // namespace seac::envs
