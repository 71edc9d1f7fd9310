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

#include "seac/checkpoint.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace seac {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'E', 'A', 'C', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}

  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint32_t>();
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void raw(char* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw CheckpointError("checkpoint: truncated data");
  }

  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

const ad::Matrix& CheckpointSection::array(const std::string& name) const {
  for (const auto& a : arrays) {
    if (a.name == name) return a.data;
  }
  throw CheckpointError(fmt::format("checkpoint section '{}': missing array '{}'", label, name));
}

std::uint64_t CheckpointSection::counter(const std::string& name) const {
  for (const auto& [n, v] : counters) {
    if (n == name) return v;
  }
  throw CheckpointError(fmt::format("checkpoint section '{}': missing counter '{}'", label, name));
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.pod<std::uint32_t>(Checkpoint::kVersion);
  w.pod<std::uint64_t>(ckpt.config_hash);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(ckpt.sections.size()));
  for (const auto& s : ckpt.sections) {
    w.str(s.label);
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(s.arrays.size()));
    for (const auto& a : s.arrays) {
      w.str(a.name);
      w.pod<std::uint32_t>(static_cast<std::uint32_t>(a.data.rows()));
      w.pod<std::uint32_t>(static_cast<std::uint32_t>(a.data.cols()));
      w.raw(reinterpret_cast<const char*>(a.data.data()),
            static_cast<std::size_t>(a.data.size()) * sizeof(double));
    }
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(s.counters.size()));
    for (const auto& [name, value] : s.counters) {
      w.str(name);
      w.pod<std::uint64_t>(value);
    }
  }
  return w.take();
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  char magic[8];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("checkpoint: bad magic");
  }
  const auto version = r.pod<std::uint32_t>();
  if (version != Checkpoint::kVersion) {
    throw CheckpointError(fmt::format("checkpoint: unsupported version {}", version));
  }
  Checkpoint ckpt;
  ckpt.config_hash = r.pod<std::uint64_t>();
  const auto n_sections = r.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_sections; ++i) {
    CheckpointSection s;
    s.label = r.str();
    const auto n_arrays = r.pod<std::uint32_t>();
    for (std::uint32_t k = 0; k < n_arrays; ++k) {
      NamedArray a;
      a.name = r.str();
      const auto rows = r.pod<std::uint32_t>();
      const auto cols = r.pod<std::uint32_t>();
      a.data.resize(rows, cols);
      r.raw(reinterpret_cast<char*>(a.data.data()),
            static_cast<std::size_t>(rows) * cols * sizeof(double));
      s.arrays.push_back(std::move(a));
    }
    const auto n_counters = r.pod<std::uint32_t>();
    for (std::uint32_t k = 0; k < n_counters; ++k) {
      std::string name = r.str();
      s.counters.emplace_back(std::move(name), r.pod<std::uint64_t>());
    }
    ckpt.sections.push_back(std::move(s));
  }
  if (!r.done()) throw CheckpointError("checkpoint: trailing bytes");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(fmt::format("cannot write {}", path.string()));
  const std::string bytes = encode_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

void append_network(CheckpointSection& section, const nn::Mlp& net) {
  for (const auto& p : net.params()) section.arrays.push_back({p.name, p.value});
}

void append_adam(CheckpointSection& section, const std::string& prefix, const nn::Mlp& net,
                 const ad::AdamState& state) {
  const auto& params = net.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    section.arrays.push_back({fmt::format("{}.m.{}", prefix, params[i].name), state.m.at(i)});
    section.arrays.push_back({fmt::format("{}.v.{}", prefix, params[i].name), state.v.at(i)});
  }
  section.counters.emplace_back(prefix + ".step", state.step);
}

namespace {

void assign_checked(const CheckpointSection& section, const std::string& name, ad::Matrix& dst) {
  const ad::Matrix& src = section.array(name);
  if (src.rows() != dst.rows() || src.cols() != dst.cols()) {
    throw CheckpointError(fmt::format("checkpoint array '{}' is {} but model expects {}", name,
                                      ad::shape_of(src).str(), ad::shape_of(dst).str()));
  }
  dst = src;
}

}  // namespace

void restore_network(const CheckpointSection& section, nn::Mlp& net) {
  for (auto& p : net.params()) assign_checked(section, p.name, p.value);
}

void restore_adam(const CheckpointSection& section, const std::string& prefix, const nn::Mlp& net,
                  ad::AdamState& state) {
  const auto& params = net.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    assign_checked(section, fmt::format("{}.m.{}", prefix, params[i].name), state.m.at(i));
    assign_checked(section, fmt::format("{}.v.{}", prefix, params[i].name), state.v.at(i));
  }
  state.step = section.counter(prefix + ".step");
}

CheckpointSection agent_section(const nn::AgentParams& agent) {
  CheckpointSection s;
  s.label = fmt::format("agent{}", agent.agent_index);
  append_network(s, agent.phi);
  append_network(s, agent.theta);
  append_adam(s, "adam_phi", agent.phi, agent.adam_phi);
  append_adam(s, "adam_theta", agent.theta, agent.adam_theta);
  s.counters.emplace_back("agent_index", static_cast<std::uint64_t>(agent.agent_index));
  return s;
}

void restore_agent(const CheckpointSection& section, nn::AgentParams& agent) {
  restore_network(section, agent.phi);
  restore_network(section, agent.theta);
  restore_adam(section, "adam_phi", agent.phi, agent.adam_phi);
  restore_adam(section, "adam_theta", agent.theta, agent.adam_theta);
  agent.agent_index = static_cast<int>(section.counter("agent_index"));
}

}  // namespace seac
