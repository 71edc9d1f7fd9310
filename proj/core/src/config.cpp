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

#include "seac/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "seac/rng.hpp"

namespace seac {

namespace pt = boost::property_tree;

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kIac: return "iac";
    case Algorithm::kSeac: return "seac";
    case Algorithm::kSnac: return "snac";
    case Algorithm::kIql: return "iql";
    case Algorithm::kSeql: return "seql";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view text) {
  for (Algorithm a : {Algorithm::kIac, Algorithm::kSeac, Algorithm::kSnac, Algorithm::kIql, Algorithm::kSeql}) {
    if (to_string(a) == text) return a;
  }
  throw ConfigError(fmt::format("unknown algorithm '{}'", text));
}

namespace {

// Shortest text that parses back to the same double.
std::string real(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

const char* boolean(bool b) { return b ? "true" : "false"; }

template <class T>
T parse_value(const std::string& section, const std::string& key, const std::string& text);

template <>
double parse_value<double>(const std::string& section, const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ConfigError(fmt::format("[{}] {}: '{}' is not a number", section, key, text));
  }
  return v;
}

template <>
std::uint64_t parse_value<std::uint64_t>(const std::string& section, const std::string& key,
                                         const std::string& text) {
  // Accept scientific shorthand like 2e6 for step counts.
  const double d = parse_value<double>(section, key, text);
  if (d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
    throw ConfigError(fmt::format("[{}] {}: '{}' is not a non-negative integer", section, key, text));
  }
  return static_cast<std::uint64_t>(d);
}

template <>
int parse_value<int>(const std::string& section, const std::string& key, const std::string& text) {
  const std::uint64_t v = parse_value<std::uint64_t>(section, key, text);
  if (v > 1u << 30) throw ConfigError(fmt::format("[{}] {}: {} is too large", section, key, text));
  return static_cast<int>(v);
}

template <>
bool parse_value<bool>(const std::string& section, const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(fmt::format("[{}] {}: '{}' is not a boolean", section, key, text));
}

class SectionReader {
 public:
  SectionReader(const pt::ptree& root, std::string name) : name_(std::move(name)) {
    if (auto child = root.get_child_optional(name_)) tree_ = &*child;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!tree_) return;
    if (auto v = tree_->get_optional<std::string>(key)) out = parse_value<T>(name_, key, *v);
  }

  void read_string(const std::string& key, std::string& out) {
    seen_.insert(key);
    if (!tree_) return;
    if (auto v = tree_->get_optional<std::string>(key)) out = *v;
  }

  void finish() const {
    if (!tree_) return;
    for (const auto& [key, _] : *tree_) {
      if (!seen_.count(key)) throw ConfigError(fmt::format("[{}] unknown key '{}'", name_, key));
    }
  }

 private:
  std::string name_;
  const pt::ptree* tree_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

void TrainConfig::validate() const {
  try {
    env.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(total_steps > 0, "[run] total_steps must be positive");
  require(log_interval > 0, "[run] log_interval must be positive");
  require(eval_episodes >= 1, "[run] eval_episodes must be >= 1");
  require(return_window >= 1, "[run] return_window must be >= 1");
  require(trace_episodes >= 0, "[run] trace_episodes must be >= 0");
  require(lambda >= 0.0, "[actor_critic] lambda must be >= 0");
  require(gamma > 0.0 && gamma <= 1.0, "[actor_critic] gamma must be in (0, 1]");
  require(lr > 0.0, "[actor_critic] lr must be positive");
  require(adam_eps > 0.0, "[actor_critic] adam_eps must be positive");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "[actor_critic] adam_beta1 must be in [0, 1)");
  require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "[actor_critic] adam_beta2 must be in [0, 1)");
  require(entropy_coef >= 0.0, "[actor_critic] entropy_coef must be >= 0");
  require(value_coef > 0.0, "[actor_critic] value_coef must be positive");
  require(grad_clip > 0.0, "[actor_critic] grad_clip must be positive");
  require(is_clip >= 0.0, "[actor_critic] is_clip must be >= 0");
  require(n_steps >= 1, "[actor_critic] n_steps must be >= 1");
  require(n_parallel >= 1, "[actor_critic] n_parallel must be >= 1");
  require(q.buffer_capacity >= 1, "[q_learning] buffer_capacity must be >= 1");
  require(q.batch_size >= 1, "[q_learning] batch_size must be >= 1");
  require(q.target_sync >= 1, "[q_learning] target_sync must be >= 1");
  require(q.eps_start >= 0.0 && q.eps_start <= 1.0, "[q_learning] eps_start must be in [0, 1]");
  require(q.eps_end >= 0.0 && q.eps_end <= 1.0, "[q_learning] eps_end must be in [0, 1]");
  require(q.eps_fraction >= 0.0 && q.eps_fraction <= 1.0, "[q_learning] eps_fraction must be in [0, 1]");
  require(q.grad_clip > 0.0, "[q_learning] grad_clip must be positive");
  require(q.lr > 0.0, "[q_learning] lr must be positive");
  require(q.buffer_capacity >= static_cast<std::uint64_t>(q.batch_size),
          "[q_learning] buffer_capacity must hold at least one batch");
}

std::string TrainConfig::to_ini() const {
  std::string s;
  s += "[run]\n";
  s += fmt::format("algorithm = {}\n", to_string(algorithm));
  s += fmt::format("seed = {}\n", seed);
  s += fmt::format("total_steps = {}\n", total_steps);
  s += fmt::format("log_interval = {}\n", log_interval);
  s += fmt::format("checkpoint_interval = {}\n", checkpoint_interval);
  s += fmt::format("eval_interval = {}\n", eval_interval);
  s += fmt::format("eval_episodes = {}\n", eval_episodes);
  s += fmt::format("return_window = {}\n", return_window);
  s += fmt::format("trace_episodes = {}\n", trace_episodes);
  s += "\n[env]\n";
  s += fmt::format("kind = {}\n", envs::to_string(env.kind));
  s += fmt::format("agents = {}\n", env.n_agents);
  s += fmt::format("rows = {}\n", env.rows);
  s += fmt::format("cols = {}\n", env.cols);
  s += fmt::format("max_episode_steps = {}\n", env.max_episode_steps);
  s += fmt::format("food = {}\n", env.n_food);
  s += fmt::format("cooperative = {}\n", boolean(env.cooperative));
  s += fmt::format("max_agent_level = {}\n", env.max_agent_level);
  s += fmt::format("size = {}\n", envs::to_string(env.rware_size));
  s += fmt::format("requests = {}\n", env.n_requests);
  s += "\n[actor_critic]\n";
  s += fmt::format("lambda = {}\n", real(lambda));
  s += fmt::format("gamma = {}\n", real(gamma));
  s += fmt::format("lr = {}\n", real(lr));
  s += fmt::format("adam_eps = {}\n", real(adam_eps));
  s += fmt::format("adam_beta1 = {}\n", real(adam_beta1));
  s += fmt::format("adam_beta2 = {}\n", real(adam_beta2));
  s += fmt::format("entropy_coef = {}\n", real(entropy_coef));
  s += fmt::format("value_coef = {}\n", real(value_coef));
  s += fmt::format("grad_clip = {}\n", real(grad_clip));
  s += fmt::format("is_clip = {}\n", real(is_clip));
  s += fmt::format("n_steps = {}\n", n_steps);
  s += fmt::format("n_parallel = {}\n", n_parallel);
  s += fmt::format("bootstrap_truncation = {}\n", boolean(bootstrap_truncation));
  s += "\n[q_learning]\n";
  s += fmt::format("buffer_capacity = {}\n", q.buffer_capacity);
  s += fmt::format("batch_size = {}\n", q.batch_size);
  s += fmt::format("target_sync = {}\n", q.target_sync);
  s += fmt::format("eps_start = {}\n", real(q.eps_start));
  s += fmt::format("eps_end = {}\n", real(q.eps_end));
  s += fmt::format("eps_fraction = {}\n", real(q.eps_fraction));
  s += fmt::format("warmup = {}\n", q.warmup);
  s += fmt::format("grad_clip = {}\n", real(q.grad_clip));
  s += fmt::format("lr = {}\n", real(q.lr));
  return s;
}

std::uint64_t TrainConfig::hash() const {
  const std::string text = to_ini();
  return fnv1a(reinterpret_cast<const unsigned char*>(text.data()), text.size());
}

TrainConfig TrainConfig::from_ini(const std::string& text) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config syntax error: {}", e.message()));
  }
  for (const auto& [name, _] : root) {
    if (name != "run" && name != "env" && name != "actor_critic" && name != "q_learning") {
      throw ConfigError(fmt::format("unknown config section [{}]", name));
    }
  }

  TrainConfig c;
  SectionReader run(root, "run");
  std::string algorithm(to_string(c.algorithm));
  run.read_string("algorithm", algorithm);
  c.algorithm = parse_algorithm(algorithm);
  run.read("seed", c.seed);
  run.read("total_steps", c.total_steps);
  run.read("log_interval", c.log_interval);
  run.read("checkpoint_interval", c.checkpoint_interval);
  run.read("eval_interval", c.eval_interval);
  run.read("eval_episodes", c.eval_episodes);
  run.read("return_window", c.return_window);
  run.read("trace_episodes", c.trace_episodes);
  run.finish();

  SectionReader env(root, "env");
  std::string preset_name;
  env.read_string("preset", preset_name);
  try {
    if (!preset_name.empty()) c.env = envs::preset(preset_name);
    std::string kind(envs::to_string(c.env.kind));
    std::string size(envs::to_string(c.env.rware_size));
    env.read_string("kind", kind);
    env.read_string("size", size);
    c.env.kind = envs::parse_env_kind(kind);
    c.env.rware_size = envs::parse_rware_size(size);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("[env] {}", e.what()));
  }
  env.read("agents", c.env.n_agents);
  env.read("rows", c.env.rows);
  env.read("cols", c.env.cols);
  env.read("max_episode_steps", c.env.max_episode_steps);
  env.read("food", c.env.n_food);
  env.read("cooperative", c.env.cooperative);
  env.read("max_agent_level", c.env.max_agent_level);
  env.read("requests", c.env.n_requests);
  env.finish();

  SectionReader ac(root, "actor_critic");
  ac.read("lambda", c.lambda);
  ac.read("gamma", c.gamma);
  ac.read("lr", c.lr);
  ac.read("adam_eps", c.adam_eps);
  ac.read("adam_beta1", c.adam_beta1);
  ac.read("adam_beta2", c.adam_beta2);
  ac.read("entropy_coef", c.entropy_coef);
  ac.read("value_coef", c.value_coef);
  ac.read("grad_clip", c.grad_clip);
  ac.read("is_clip", c.is_clip);
  ac.read("n_steps", c.n_steps);
  ac.read("n_parallel", c.n_parallel);
  ac.read("bootstrap_truncation", c.bootstrap_truncation);
  ac.finish();

  SectionReader q(root, "q_learning");
  q.read("buffer_capacity", c.q.buffer_capacity);
  q.read("batch_size", c.q.batch_size);
  q.read("target_sync", c.q.target_sync);
  q.read("eps_start", c.q.eps_start);
  q.read("eps_end", c.q.eps_end);
  q.read("eps_fraction", c.q.eps_fraction);
  q.read("warmup", c.q.warmup);
  q.read("grad_clip", c.q.grad_clip);
  q.read("lr", c.q.lr);
  q.finish();

  c.validate();
  return c;
}

TrainConfig TrainConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return from_ini(ss.str());
}

}  // namespace seac
