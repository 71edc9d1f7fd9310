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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seac/networks.hpp"

namespace seac {

/// Binary checkpoint container. Byte layout (all integers little-endian,
/// reals IEEE-754 binary64, strings are u32 length + bytes):
///
///   "SEACCKPT"  u32 version  u64 config_hash  u32 section_count
///   section:    str label  u32 array_count  array*  u32 counter_count  counter*
///   array:      str name  u32 rows  u32 cols  f64[rows*cols] (row-major)
///   counter:    str name  u64 value
///
/// See docs/checkpoint_format.md.
struct NamedArray {
  std::string name;
  ad::Matrix data;
};

struct CheckpointSection {
  std::string label;
  std::vector<NamedArray> arrays;
  std::vector<std::pair<std::string, std::uint64_t>> counters;

  const ad::Matrix& array(const std::string& name) const;
  std::uint64_t counter(const std::string& name) const;
};

struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::uint64_t config_hash = 0;
  std::vector<CheckpointSection> sections;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Network weights under their parameter names (e.g. "phi.W0").
void append_network(CheckpointSection& section, const nn::Mlp& net);
/// Adam moments as "<prefix>.m.<param>" / "<prefix>.v.<param>" plus a
/// "<prefix>.step" counter.
void append_adam(CheckpointSection& section, const std::string& prefix, const nn::Mlp& net,
                 const ad::AdamState& state);
void restore_network(const CheckpointSection& section, nn::Mlp& net);
void restore_adam(const CheckpointSection& section, const std::string& prefix, const nn::Mlp& net,
                  ad::AdamState& state);

CheckpointSection agent_section(const nn::AgentParams& agent);
/// Loads into an already-shaped AgentParams; throws CheckpointError on any
/// shape mismatch.
void restore_agent(const CheckpointSection& section, nn::AgentParams& agent);

}  // namespace seac
