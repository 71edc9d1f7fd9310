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
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "seac/env.hpp"

namespace seac::envs {

/// One environment tick as written to a trace file.
struct TraceRecord {
  int episode = 0;
  int step = 0;
  std::vector<std::uint64_t> obs_hash;  // observation before the step
  std::vector<int> actions;
  std::vector<double> rewards;
  bool done = false;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// FNV-1a over the IEEE-754 bytes of the observation.
std::uint64_t observation_hash(std::span<const double> obs);

std::string to_json_line(const TraceRecord& rec);
TraceRecord from_json_line(const std::string& line);

/// Line-delimited JSON writer; one object per tick.
class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);
  void write(const TraceRecord& rec);
  void write(int episode, int step, std::span<const Observation> obs, std::span<const int> actions,
             std::span<const double> rewards, bool done);

 private:
  std::ofstream out_;
};

std::vector<TraceRecord> read_trace(const std::string& path);

}  // namespace seac::envs
