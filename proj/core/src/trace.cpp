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

#include "seac/trace.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <stdexcept>

#include "seac/rng.hpp"

namespace seac::envs {

std::uint64_t observation_hash(std::span<const double> obs) {
  return fnv1a(reinterpret_cast<const unsigned char*>(obs.data()), obs.size_bytes());
}

std::string to_json_line(const TraceRecord& rec) {
  nlohmann::json j;
  j["episode"] = rec.episode;
  j["step"] = rec.step;
  j["obs_hash"] = rec.obs_hash;
  j["actions"] = rec.actions;
  j["rewards"] = rec.rewards;
  j["done"] = rec.done;
  return j.dump();
}

TraceRecord from_json_line(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  TraceRecord rec;
  rec.episode = j.at("episode").get<int>();
  rec.step = j.at("step").get<int>();
  rec.obs_hash = j.at("obs_hash").get<std::vector<std::uint64_t>>();
  rec.actions = j.at("actions").get<std::vector<int>>();
  rec.rewards = j.at("rewards").get<std::vector<double>>();
  rec.done = j.at("done").get<bool>();
  return rec;
}

TraceWriter::TraceWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open trace file " + path);
}

void TraceWriter::write(const TraceRecord& rec) { out_ << to_json_line(rec) << '\n'; }

void TraceWriter::write(int episode, int step, std::span<const Observation> obs, std::span<const int> actions,
                        std::span<const double> rewards, bool done) {
  TraceRecord rec;
  rec.episode = episode;
  rec.step = step;
  for (const Observation& o : obs) rec.obs_hash.push_back(observation_hash(o));
  rec.actions.assign(actions.begin(), actions.end());
  rec.rewards.assign(rewards.begin(), rewards.end());
  rec.done = done;
  write(rec);
}

std::vector<TraceRecord> read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path);
  std::vector<TraceRecord> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(from_json_line(line));
  }
  return out;
}

}  // namespace seac::envs
