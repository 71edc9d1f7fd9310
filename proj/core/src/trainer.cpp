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

#include "seac/trainer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <memory>
#include <nlohmann/json.hpp>

#include "seac/env.hpp"
#include "seac/networks.hpp"
#include "seac/rng.hpp"
#include "seac/stats.hpp"
#include "seac/trace.hpp"

namespace seac {

namespace fs = std::filesystem;
using algo::Boundary;
using ad::Matrix;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// RNG stream ids derived from the run seed.
constexpr std::uint64_t kActionStream = 1;
constexpr std::uint64_t kEnvStream = 100;
constexpr std::uint64_t kInitStream = 1000;
constexpr std::uint64_t kEvalStream = 5000;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  return fmt::format("{:.9g}", x);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

ad::AdamConfig ac_adam(const TrainConfig& c) { return {c.lr, c.adam_beta1, c.adam_beta2, c.adam_eps}; }
ad::AdamConfig q_adam(const TrainConfig& c) { return {c.q.lr, c.adam_beta1, c.adam_beta2, c.adam_eps}; }

struct Learners {
  bool shared = false;
  std::vector<nn::AgentParams> ac;
  std::vector<algo::QParams> q;

  nn::AgentParams& policy(int i) { return shared ? ac[0] : ac[static_cast<std::size_t>(i)]; }
};

Learners init_learners(const TrainConfig& c, int obs_dim, int n_actions) {
  Learners l;
  const int n = c.env.n_agents;
  if (is_actor_critic(c.algorithm)) {
    l.shared = c.algorithm == Algorithm::kSnac;
    const int count = l.shared ? 1 : n;
    for (int i = 0; i < count; ++i) {
      l.ac.push_back(nn::init_agent(derive_seed(c.seed, kInitStream + i), obs_dim, n_actions, ac_adam(c), i));
    }
  } else {
    for (int i = 0; i < n; ++i) {
      l.q.push_back(algo::init_q(derive_seed(c.seed, kInitStream + i), obs_dim, n_actions, q_adam(c)));
    }
  }
  return l;
}

Checkpoint make_checkpoint(const TrainConfig& c, const Learners& l, std::uint64_t step, std::uint64_t updates,
                           std::uint64_t episodes) {
  Checkpoint ck;
  ck.config_hash = c.hash();
  CheckpointSection t;
  t.label = "trainer";
  t.counters = {{"step", step},
                {"updates", updates},
                {"episodes", episodes},
                {"algorithm", static_cast<std::uint64_t>(c.algorithm)},
                {"n_agents", static_cast<std::uint64_t>(c.env.n_agents)}};
  ck.sections.push_back(std::move(t));
  for (const nn::AgentParams& a : l.ac) ck.sections.push_back(agent_section(a));
  for (std::size_t i = 0; i < l.q.size(); ++i) {
    CheckpointSection s;
    s.label = fmt::format("q{}", i);
    append_network(s, l.q[i].online);
    append_adam(s, "adam", l.q[i].online, l.q[i].adam);
    s.counters.emplace_back("updates", l.q[i].updates);
    ck.sections.push_back(std::move(s));
    CheckpointSection target;
    target.label = fmt::format("q{}.target", i);
    append_network(target, l.q[i].target);
    ck.sections.push_back(std::move(target));
  }
  return ck;
}

const CheckpointSection& find_section(const Checkpoint& ck, const std::string& label) {
  for (const auto& s : ck.sections) {
    if (s.label == label) return s;
  }
  throw CheckpointError(fmt::format("checkpoint has no section '{}'", label));
}

void restore_learners(const Checkpoint& ck, Learners& l) {
  for (std::size_t i = 0; i < l.ac.size(); ++i) restore_agent(find_section(ck, fmt::format("agent{}", i)), l.ac[i]);
  for (std::size_t i = 0; i < l.q.size(); ++i) {
    const CheckpointSection& s = find_section(ck, fmt::format("q{}", i));
    restore_network(s, l.q[i].online);
    restore_adam(s, "adam", l.q[i].online, l.q[i].adam);
    l.q[i].updates = s.counter("updates");
    restore_network(find_section(ck, fmt::format("q{}.target", i)), l.q[i].target);
  }
}

Matrix stack_rows(const std::vector<std::vector<envs::Observation>>& obs, int agent) {
  const auto rows = static_cast<Eigen::Index>(obs.size());
  const auto cols = static_cast<Eigen::Index>(obs[0][static_cast<std::size_t>(agent)].size());
  Matrix m(rows, cols);
  for (Eigen::Index e = 0; e < rows; ++e) {
    const auto& o = obs[static_cast<std::size_t>(e)][static_cast<std::size_t>(agent)];
    for (Eigen::Index k = 0; k < cols; ++k) m(e, k) = o[static_cast<std::size_t>(k)];
  }
  return m;
}

void set_row(Matrix& m, Eigen::Index row, const envs::Observation& o) {
  for (Eigen::Index k = 0; k < m.cols(); ++k) m(row, k) = o[static_cast<std::size_t>(k)];
}

int argmax(std::span<const double> v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Undiscounted episode returns over a trailing window of completed episodes.
class ReturnTracker {
 public:
  ReturnTracker(int n_envs, int n_agents, int window)
      : n_agents_(n_agents), window_(window), running_(n_envs, std::vector<double>(n_agents, 0.0)) {}

  void add(int env, std::span<const double> rewards) {
    for (int i = 0; i < n_agents_; ++i) running_[env][i] += rewards[i];
  }

  void finish(int env) {
    recent_.push_back(running_[env]);
    if (static_cast<int>(recent_.size()) > window_) recent_.pop_front();
    std::fill(running_[env].begin(), running_[env].end(), 0.0);
    ++episodes_;
  }

  std::uint64_t episodes() const { return episodes_; }

  std::vector<double> agent_means() const {
    std::vector<double> out(n_agents_, kNaN);
    if (recent_.empty()) return out;
    for (int i = 0; i < n_agents_; ++i) {
      double s = 0.0;
      for (const auto& r : recent_) s += r[i];
      out[i] = s / static_cast<double>(recent_.size());
    }
    return out;
  }

  double sum_mean() const {
    if (recent_.empty()) return kNaN;
    double s = 0.0;
    for (const auto& r : recent_) {
      for (double x : r) s += x;
    }
    return s / static_cast<double>(recent_.size());
  }

 private:
  int n_agents_;
  int window_;
  std::vector<std::vector<double>> running_;
  std::deque<std::vector<double>> recent_;
  std::uint64_t episodes_ = 0;
};

/// Per-interval sums feeding one metrics row.
struct Interval {
  double policy = 0.0, value = 0.0, entropy = 0.0, grad_norm = 0.0;
  std::uint64_t ac_terms = 0;
  double q_loss = 0.0;
  std::uint64_t q_terms = 0;
  double q_abs_max = kNaN;
  std::vector<double> weights;

  void reset() { *this = Interval{}; }
};

class RunWriter {
 public:
  RunWriter(const TrainConfig& c, const fs::path& dir) : config_(c), dir_(dir), start_(Clock::now()) {
    fs::create_directories(dir_ / "checkpoints");
    write_file(dir_ / "config.ini", c.to_ini());
    metrics_.open(dir_ / "metrics.csv", std::ios::binary);
    timing_.open(dir_ / "timing.csv", std::ios::binary);
    if (!metrics_ || !timing_) throw std::runtime_error("cannot create run files in " + dir_.string());
    metrics_ << "# metrics-schema: " << kMetricsSchemaVersion << '\n' << metrics_header(c.env.n_agents) << '\n';
    timing_ << "step,wall_seconds,steps_per_second\n";
    if (c.eval_interval > 0) {
      eval_.open(dir_ / "eval.csv", std::ios::binary);
      eval_ << "step,episodes,return_sum_mean,return_sum_std\n";
    }
    if (c.trace_episodes > 0) {
      fs::create_directories(dir_ / "traces");
      trace_ = std::make_unique<envs::TraceWriter>((dir_ / "traces" / "env0.jsonl").string());
    }
  }

  void metrics(const MetricsRow& row) {
    metrics_ << format_metrics_row(row) << '\n';
    metrics_.flush();
    const double secs = std::chrono::duration<double>(Clock::now() - start_).count();
    timing_ << fmt::format("{},{:.3f},{:.1f}\n", row.step, secs, secs > 0 ? row.step / secs : 0.0);
    timing_.flush();
  }

  void eval(std::uint64_t step, const EvalResult& r) {
    eval_ << fmt::format("{},{},{},{}\n", step, r.episodes, num(r.sum_mean), num(r.sum_std));
    eval_.flush();
  }

  fs::path checkpoint(const Checkpoint& ck, std::uint64_t step) {
    const fs::path p = dir_ / "checkpoints" / fmt::format("step_{}", step);
    save_checkpoint(p, ck);
    return p;
  }

  envs::TraceWriter* trace() { return trace_.get(); }
  const fs::path& dir() const { return dir_; }

 private:
  using Clock = std::chrono::steady_clock;
  const TrainConfig& config_;
  fs::path dir_;
  Clock::time_point start_;
  std::ofstream metrics_;
  std::ofstream timing_;
  std::ofstream eval_;
  std::unique_ptr<envs::TraceWriter> trace_;
};

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(m.row(r).data(), m.row(r).data() + m.cols());
    rows.push_back(row);
  }
  return rows;
}

[[noreturn]] void diverge_ac(const fs::path& dir, std::uint64_t step, const std::string& why,
                             const algo::RolloutBatch& batch) {
  nlohmann::json j;
  j["step"] = step;
  j["reason"] = why;
  for (const algo::AgentRollout& r : batch.agents) {
    nlohmann::json a;
    a["obs"] = matrix_json(r.obs);
    a["next_obs"] = matrix_json(r.next_obs);
    a["actions"] = r.actions;
    a["behavior_log_probs"] = r.behavior_log_probs;
    a["rewards"] = r.rewards;
    std::vector<int> b;
    for (Boundary x : r.boundaries) b.push_back(static_cast<int>(x));
    a["boundaries"] = b;
    j["agents"].push_back(a);
  }
  const fs::path p = dir / "divergence_dump.json";
  write_file(p, j.dump(1));
  throw DivergenceError(fmt::format("non-finite value at step {}: {}", step, why), p);
}

[[noreturn]] void diverge_q(const fs::path& dir, std::uint64_t step, const std::string& why,
                            const algo::QBatch& batch) {
  nlohmann::json j;
  j["step"] = step;
  j["reason"] = why;
  j["obs"] = matrix_json(batch.obs);
  j["next_obs"] = matrix_json(batch.next_obs);
  j["actions"] = batch.actions;
  j["rewards"] = batch.rewards;
  j["terminal"] = batch.terminal;
  j["source"] = batch.source;
  const fs::path p = dir / "divergence_dump.json";
  write_file(p, j.dump(1));
  throw DivergenceError(fmt::format("non-finite value at step {}: {}", step, why), p);
}

/// Interval bookkeeping shared by both training loops.
class Schedule {
 public:
  Schedule(std::uint64_t interval) : interval_(interval), next_(interval) {}
  bool due(std::uint64_t step) {
    if (interval_ == 0 || step < next_) return false;
    next_ = (step / interval_ + 1) * interval_;
    return true;
  }

 private:
  std::uint64_t interval_;
  std::uint64_t next_;
};

struct LoopState {
  std::uint64_t step = 0;
  std::uint64_t updates = 0;
  std::uint64_t last_logged = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t last_checkpoint = std::numeric_limits<std::uint64_t>::max();
  fs::path last_checkpoint_path;
  std::uint64_t evals = 0;
};

class Runner {
 public:
  Runner(const TrainConfig& c, const fs::path& dir, const TrainOptions& opt)
      : c_(c),
        opt_(opt),
        out_(c, dir),
        n_(c.env.n_agents),
        tracker_(c.n_parallel, c.env.n_agents, c.return_window),
        log_(c.log_interval),
        ckpt_(c.checkpoint_interval),
        evals_(c.eval_interval),
        share_weights_(c.algorithm == Algorithm::kSeac && c.lambda > 0.0),
        quarters_(4, stats::Histogram(0.01, 4.0)) {
    for (int e = 0; e < c.n_parallel; ++e) {
      envs_.push_back(envs::make_env(c.env));
      obs_.push_back(envs_.back()->reset(derive_seed(c.seed, kEnvStream + e)));
    }
    obs_dim_ = envs_[0]->obs_dim();
    n_actions_ = envs_[0]->n_actions();
    learners_ = init_learners(c, obs_dim_, n_actions_);
    rng_.seed(derive_seed(c.seed, kActionStream));
  }

  TrainResult run() {
    if (is_actor_critic(c_.algorithm)) {
      run_actor_critic();
    } else {
      run_q_learning();
    }
    return finish();
  }

 private:
  // Steps env e with `actions`, updating returns, traces and observations.
  envs::StepResult step_env(int e, std::span<const int> actions) {
    envs::StepResult res = envs_[e]->step(actions);
    tracker_.add(e, res.rewards);
    if (e == 0 && out_.trace() && trace_episode_ < c_.trace_episodes) {
      out_.trace()->write(trace_episode_, res.info.episode_step - 1, obs_[0], actions, res.rewards, res.done);
    }
    if (res.done) {
      tracker_.finish(e);
      if (e == 0) ++trace_episode_;
      obs_[e] = envs_[e]->reset();
    } else {
      obs_[e] = res.observations;
    }
    return res;
  }

  Boundary boundary_of(const envs::StepResult& res) const {
    if (!res.done) return Boundary::kNone;
    return res.info.truncated && c_.bootstrap_truncation ? Boundary::kTruncated : Boundary::kTerminal;
  }

  void run_actor_critic() {
    const int E = c_.n_parallel;
    const int T = c_.n_steps;
    algo::RolloutBatch batch;
    batch.n_envs = E;
    batch.n_steps = T;
    batch.agents.resize(n_);
    for (auto& r : batch.agents) {
      r.obs.resize(E * T, obs_dim_);
      r.next_obs.resize(E * T, obs_dim_);
      r.actions.assign(E * T, 0);
      r.behavior_log_probs.assign(E * T, 0.0);
      r.rewards.assign(E * T, 0.0);
      r.boundaries.assign(E * T, Boundary::kNone);
    }
    const algo::ActorCriticConfig acc{c_.gamma, c_.value_coef, c_.entropy_coef, c_.lambda, c_.is_clip};
    std::vector<nn::AgentParams*> agents;
    for (auto& a : learners_.ac) agents.push_back(&a);

    std::vector<Matrix> log_probs(n_);
    std::vector<int> joint(n_);
    while (s_.step < c_.total_steps) {
      for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n_; ++i) log_probs[i] = nn::policy_log_probs(stack_rows(obs_, i), learners_.policy(i).phi);
        std::vector<std::vector<nn::ActionSample>> picks(E, std::vector<nn::ActionSample>(n_));
        for (int e = 0; e < E; ++e) {
          for (int i = 0; i < n_; ++i) picks[e][i] = nn::sample_action(nn::row_span(log_probs[i], e), rng_);
        }
        for (int e = 0; e < E; ++e) {
          const Eigen::Index row = e * T + t;
          for (int i = 0; i < n_; ++i) {
            algo::AgentRollout& r = batch.agents[i];
            set_row(r.obs, row, obs_[e][i]);
            r.actions[row] = joint[i] = picks[e][i].action;
            r.behavior_log_probs[row] = picks[e][i].log_prob;
          }
          const envs::StepResult res = step_env(e, joint);
          for (int i = 0; i < n_; ++i) {
            algo::AgentRollout& r = batch.agents[i];
            r.rewards[row] = res.rewards[i];
            set_row(r.next_obs, row, res.observations[i]);
            r.boundaries[row] = boundary_of(res);
          }
        }
        s_.step += static_cast<std::uint64_t>(E);
      }
      update_actor_critic(batch, agents, acc);
      after_update();
    }
  }

  void update_actor_critic(const algo::RolloutBatch& batch, std::vector<nn::AgentParams*>& agents,
                           const algo::ActorCriticConfig& acc) {
    std::vector<algo::LossTerms> terms;
    try {
      switch (c_.algorithm) {
        case Algorithm::kIac:
          for (int i = 0; i < n_; ++i) {
            agents[i]->zero_grad();
            terms.push_back(algo::iac_loss(*agents[i], batch.agents[i], batch.n_envs, batch.n_steps, acc));
          }
          break;
        case Algorithm::kSeac:
          for (int i = 0; i < n_; ++i) {
            agents[i]->zero_grad();
            terms.push_back(algo::seac_loss(agents, i, batch, acc));
          }
          break;
        case Algorithm::kSnac: {
          agents[0]->zero_grad();
          algo::LossTerms t = algo::snac_loss(*agents[0], batch, acc);
          t.policy /= n_;
          t.value /= n_;
          t.entropy /= n_;
          terms.push_back(t);
          break;
        }
        default: break;
      }
    } catch (const ad::NonFiniteError& err) {
      diverge_ac(out_.dir(), s_.step, err.what(), batch);
    }
    for (const auto& t : terms) {
      if (!std::isfinite(t.total)) diverge_ac(out_.dir(), s_.step, "loss is not finite", batch);
    }
    for (std::size_t k = 0; k < agents.size(); ++k) {
      const double norm = algo::apply_update(*agents[k], c_.grad_clip);
      if (!std::isfinite(norm)) diverge_ac(out_.dir(), s_.step, "gradient norm is not finite", batch);
      interval_.grad_norm += norm;
    }
    for (const auto& t : terms) {
      interval_.policy += t.policy;
      interval_.value += t.value;
      interval_.entropy += t.entropy;
      ++interval_.ac_terms;
      if (share_weights_) record_weights(t.importance_weights);
    }
  }

  void record_weights(const std::vector<double>& w) {
    const std::uint64_t quarter = std::min<std::uint64_t>(3, s_.step * 4 / c_.total_steps);
    const bool final_quarter = 4 * s_.step > 3 * c_.total_steps;
    for (double x : w) {
      quarters_[quarter].add(x);
      if (final_quarter) final_weights_.push_back(x);
    }
    interval_.weights.insert(interval_.weights.end(), w.begin(), w.end());
  }

  void run_q_learning() {
    const int E = c_.n_parallel;
    buffers_ = algo::make_buffers(n_, c_.q.buffer_capacity, obs_dim_);
    const std::size_t m = static_cast<std::size_t>(c_.q.batch_size);
    const std::uint64_t warm = std::max<std::uint64_t>(c_.q.warmup, m);
    std::vector<Matrix> q_values(n_);
    std::vector<std::vector<int>> joint(E, std::vector<int>(n_));
    while (s_.step < c_.total_steps) {
      epsilon_ = algo::epsilon_at(s_.step, c_.total_steps, c_.q.eps_start, c_.q.eps_end, c_.q.eps_fraction);
      for (int i = 0; i < n_; ++i) q_values[i] = learners_.q[i].online.predict(stack_rows(obs_, i));
      for (int e = 0; e < E; ++e) {
        for (int i = 0; i < n_; ++i) {
          joint[e][i] = uniform01(rng_) < epsilon_ ? static_cast<int>(uniform_below(rng_, n_actions_))
                                                   : argmax(nn::row_span(q_values[i], e));
        }
      }
      for (int e = 0; e < E; ++e) {
        const std::vector<envs::Observation> before = obs_[e];
        const envs::StepResult res = step_env(e, joint[e]);
        const bool terminal = boundary_of(res) == Boundary::kTerminal;
        for (int i = 0; i < n_; ++i) {
          buffers_[i].push({before[i], joint[e][i], res.rewards[i], terminal, res.observations[i]});
        }
      }
      s_.step += static_cast<std::uint64_t>(E);

      const bool ready = std::all_of(buffers_.begin(), buffers_.end(),
                                     [&](const algo::ReplayBuffer& b) { return b.size() >= warm; });
      if (!ready) continue;
      if (c_.algorithm == Algorithm::kSeql) {
        const algo::QBatch batch = algo::seql_sample(buffers_, m, rng_);
        for (int i = 0; i < n_; ++i) q_step(i, batch);
      } else {
        for (int i = 0; i < n_; ++i) q_step(i, algo::iql_sample(buffers_[i], m, rng_));
      }
      after_update();
    }
  }

  void q_step(int i, const algo::QBatch& batch) {
    algo::QParams& q = learners_.q[i];
    const ad::ParameterList params = q.online.parameters();
    ad::zero_grad(params);
    double max_q = 0.0;
    const double loss = algo::dqn_loss(q, batch, c_.gamma, true, &max_q);
    if (!std::isfinite(loss) || !std::isfinite(max_q)) diverge_q(out_.dir(), s_.step, "q loss is not finite", batch);
    const double norm = ad::clip_grad_norm(params, c_.q.grad_clip);
    if (!std::isfinite(norm)) diverge_q(out_.dir(), s_.step, "q gradient norm is not finite", batch);
    ad::adam_update(params, q.adam);
    ++q.updates;
    if (q.updates % static_cast<std::uint64_t>(c_.q.target_sync) == 0) q.sync_target();
    consumed_ += batch.size();
    interval_.q_loss += loss;
    interval_.grad_norm += norm;
    ++interval_.q_terms;
    interval_.q_abs_max = std::isnan(interval_.q_abs_max) ? max_q : std::max(interval_.q_abs_max, max_q);
    max_abs_q_ = std::max(max_abs_q_, max_q);
  }

  void after_update() {
    ++s_.updates;
    if (log_.due(s_.step)) log_row();
    if (ckpt_.due(s_.step)) save_checkpoint_now();
    if (evals_.due(s_.step)) run_eval();
  }

  void log_row() {
    MetricsRow row;
    row.step = s_.step;
    row.updates = s_.updates;
    row.episodes = tracker_.episodes();
    row.return_sum = tracker_.sum_mean();
    row.return_agent = tracker_.agent_means();
    const bool ac = is_actor_critic(c_.algorithm);
    const auto per = [](double sum, std::uint64_t n) { return n ? sum / static_cast<double>(n) : kNaN; };
    row.policy_loss = ac ? per(interval_.policy, interval_.ac_terms) : kNaN;
    row.value_loss = ac ? per(interval_.value, interval_.ac_terms) : kNaN;
    row.entropy = ac ? per(interval_.entropy, interval_.ac_terms) : kNaN;
    const std::uint64_t norm_terms =
        ac ? interval_.ac_terms : interval_.q_terms;
    row.grad_norm = per(interval_.grad_norm, norm_terms);
    if (share_weights_ && !interval_.weights.empty()) {
      row.is_mean = stats::mean(interval_.weights);
      row.is_median = stats::quantile(interval_.weights, 0.5);
      row.is_p05 = stats::quantile(interval_.weights, 0.05);
      row.is_p95 = stats::quantile(interval_.weights, 0.95);
      row.is_in_band = stats::fraction_within(interval_.weights, 0.5, 1.5);
    } else {
      row.is_mean = row.is_median = row.is_p05 = row.is_p95 = row.is_in_band = kNaN;
    }
    row.q_loss = ac ? kNaN : per(interval_.q_loss, interval_.q_terms);
    row.q_abs_max = ac ? kNaN : interval_.q_abs_max;
    row.epsilon = ac ? kNaN : epsilon_;
    out_.metrics(row);
    s_.last_logged = s_.step;
    interval_.reset();
    if (opt_.on_log) opt_.on_log(row);
  }

  void save_checkpoint_now() {
    s_.last_checkpoint_path =
        out_.checkpoint(make_checkpoint(c_, learners_, s_.step, s_.updates, tracker_.episodes()), s_.step);
    s_.last_checkpoint = s_.step;
  }

  void run_eval() {
    const Checkpoint ck = make_checkpoint(c_, learners_, s_.step, s_.updates, tracker_.episodes());
    out_.eval(s_.step, evaluate(c_, ck, c_.eval_episodes, derive_seed(c_.seed, kEvalStream + s_.evals++)));
  }

  TrainResult finish() {
    if (s_.last_logged != s_.step) log_row();
    if (s_.last_checkpoint != s_.step) save_checkpoint_now();

    TrainResult r;
    r.run_dir = out_.dir();
    r.steps = s_.step;
    r.updates = s_.updates;
    r.episodes = tracker_.episodes();
    r.final_return_sum = tracker_.sum_mean();
    r.final_returns = tracker_.agent_means();
    r.final_quarter.count = final_weights_.size();
    r.final_quarter.median = stats::quantile(final_weights_, 0.5);
    r.final_quarter.in_band = stats::fraction_within(final_weights_, 0.5, 1.5);
    for (const auto& b : buffers_) r.buffer_draws.push_back(b.samples_drawn());
    r.samples_consumed = consumed_;
    r.max_abs_q = max_abs_q_;
    r.last_checkpoint = s_.last_checkpoint_path;

    if (share_weights_) {
      std::string csv = "bin_lower,bin_upper,q1,q2,q3,q4\n";
      for (std::size_t b = 0; b < quarters_[0].bins(); ++b) {
        csv += fmt::format("{},{}", num(quarters_[0].lower(b)), num(quarters_[0].upper(b)));
        for (const auto& h : quarters_) csv += fmt::format(",{}", h.count(b));
        csv += '\n';
      }
      write_file(out_.dir() / "importance_weights.csv", csv);
    }

    nlohmann::json j;
    j["algorithm"] = std::string(to_string(c_.algorithm));
    j["env"] = c_.env.describe();
    j["seed"] = c_.seed;
    j["config_hash"] = fmt::format("{:016x}", c_.hash());
    j["steps"] = r.steps;
    j["updates"] = r.updates;
    j["episodes"] = r.episodes;
    j["final_return_sum"] = num(r.final_return_sum);
    std::vector<std::string> fr;
    for (double x : r.final_returns) fr.push_back(num(x));
    j["final_returns"] = fr;
    if (share_weights_) {
      j["importance_final_quarter"] = {{"count", r.final_quarter.count},
                                       {"median", num(r.final_quarter.median)},
                                       {"in_band_0.5_1.5", num(r.final_quarter.in_band)}};
    }
    if (!is_actor_critic(c_.algorithm)) {
      j["q_learning"] = {{"buffer_draws", r.buffer_draws},
                         {"samples_consumed", r.samples_consumed},
                         {"max_abs_q", num(r.max_abs_q)}};
    }
    j["last_checkpoint"] = r.last_checkpoint.filename().string();
    write_file(out_.dir() / "summary.json", j.dump(2) + "\n");
    return r;
  }

  const TrainConfig& c_;
  const TrainOptions& opt_;
  RunWriter out_;
  int n_;
  int obs_dim_ = 0;
  int n_actions_ = 0;
  std::vector<std::unique_ptr<envs::Environment>> envs_;
  std::vector<std::vector<envs::Observation>> obs_;
  Learners learners_;
  std::vector<algo::ReplayBuffer> buffers_;
  Rng rng_;
  ReturnTracker tracker_;
  Schedule log_;
  Schedule ckpt_;
  Schedule evals_;
  LoopState s_;
  Interval interval_;
  bool share_weights_;
  std::vector<stats::Histogram> quarters_;
  std::vector<double> final_weights_;
  int trace_episode_ = 0;
  double epsilon_ = kNaN;
  std::uint64_t consumed_ = 0;
  double max_abs_q_ = 0.0;
};

EvalResult evaluate_learners(const TrainConfig& c, Learners& l, int episodes, std::uint64_t seed, bool greedy) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episodes must be >= 1");
  auto env = envs::make_env(c.env);
  Rng rng(derive_seed(seed, kActionStream));
  const int n = c.env.n_agents;
  std::vector<std::vector<double>> returns(n);
  std::vector<double> sums;
  std::vector<envs::Observation> obs = env->reset(derive_seed(seed, kEnvStream));
  std::vector<int> joint(n);
  for (int ep = 0; ep < episodes; ++ep) {
    if (ep > 0) obs = env->reset();
    std::vector<double> g(n, 0.0);
    for (bool done = false; !done;) {
      for (int i = 0; i < n; ++i) {
        Matrix o(1, static_cast<Eigen::Index>(obs[i].size()));
        set_row(o, 0, obs[i]);
        if (!l.ac.empty()) {
          const Matrix lp = nn::policy_log_probs(o, l.policy(i).phi);
          joint[i] = greedy ? argmax(nn::row_span(lp, 0)) : nn::sample_action(nn::row_span(lp, 0), rng).action;
        } else {
          const Matrix qv = l.q[i].online.predict(o);
          const bool explore = !greedy && uniform01(rng) < c.q.eps_end;
          joint[i] = explore ? static_cast<int>(uniform_below(rng, env->n_actions())) : argmax(nn::row_span(qv, 0));
        }
      }
      const envs::StepResult res = env->step(joint);
      for (int i = 0; i < n; ++i) g[i] += res.rewards[i];
      obs = res.observations;
      done = res.done;
    }
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      returns[i].push_back(g[i]);
      s += g[i];
    }
    sums.push_back(s);
  }
  EvalResult r;
  r.episodes = episodes;
  for (int i = 0; i < n; ++i) {
    r.mean.push_back(stats::mean(returns[i]));
    r.std.push_back(stats::stddev(returns[i]));
  }
  r.sum_mean = stats::mean(sums);
  r.sum_std = stats::stddev(sums);
  return r;
}

}  // namespace

std::string metrics_header(int n_agents) {
  std::string h = "step,updates,episodes,return_sum";
  for (int i = 0; i < n_agents; ++i) h += fmt::format(",return_agent_{}", i);
  h += ",policy_loss,value_loss,entropy,grad_norm,is_mean,is_median,is_p05,is_p95,is_in_band,q_loss,q_abs_max,epsilon";
  return h;
}

std::string format_metrics_row(const MetricsRow& r) {
  std::string s = fmt::format("{},{},{},{}", r.step, r.updates, r.episodes, num(r.return_sum));
  for (double x : r.return_agent) s += "," + num(x);
  for (double x : {r.policy_loss, r.value_loss, r.entropy, r.grad_norm, r.is_mean, r.is_median, r.is_p05, r.is_p95,
                   r.is_in_band, r.q_loss, r.q_abs_max, r.epsilon}) {
    s += "," + num(x);
  }
  return s;
}

TrainResult train(const TrainConfig& config, const fs::path& run_dir, const TrainOptions& options) {
  config.validate();
  Runner runner(config, run_dir, options);
  return runner.run();
}

EvalResult evaluate(const TrainConfig& config, const Checkpoint& checkpoint, int episodes, std::uint64_t seed,
                    bool greedy) {
  config.validate();
  auto probe = envs::make_env(config.env);
  Learners l = init_learners(config, probe->obs_dim(), probe->n_actions());
  restore_learners(checkpoint, l);
  return evaluate_learners(config, l, episodes, seed, greedy);
}

EvalResult evaluate_untrained(const TrainConfig& config, int episodes, std::uint64_t seed) {
  config.validate();
  auto probe = envs::make_env(config.env);
  Learners l = init_learners(config, probe->obs_dim(), probe->n_actions());
  return evaluate_learners(config, l, episodes, seed, false);
}

fs::path latest_checkpoint(const fs::path& run_dir) {
  fs::path best;
  std::uint64_t best_step = 0;
  bool found = false;
  const fs::path dir = run_dir / "checkpoints";
  if (!fs::is_directory(dir)) throw CheckpointError("no checkpoints directory in " + run_dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("step_", 0) != 0) continue;
    const std::uint64_t step = std::stoull(name.substr(5));
    if (!found || step > best_step) {
      best = entry.path();
      best_step = step;
      found = true;
    }
  }
  if (!found) throw CheckpointError("no checkpoints in " + dir.string());
  return best;
}

}  // namespace seac
