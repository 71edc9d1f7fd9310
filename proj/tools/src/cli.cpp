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

#include "seac_tools/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <optional>

#include "seac/checkpoint.hpp"
#include "seac/config.hpp"
#include "seac/plot.hpp"
#include "seac/trainer.hpp"
#include "seac/verification.hpp"

namespace seac::cli {

namespace fs = std::filesystem;

namespace {

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> steps;
  std::optional<std::string> algorithm;
  std::optional<double> lambda;
  std::string out_dir;
  bool quiet = false;
};

struct EvalArgs {
  std::string config;
  std::string checkpoint;
  std::string run_dir;
  int episodes = 100;
  std::uint64_t seed = 0;
  bool greedy = false;
};

struct VerifyArgs {
  int random_games = 100;
  std::uint64_t seed = 2024;
  std::uint64_t mc_samples = 100000;
};

struct PlotArgs {
  std::vector<std::string> runs;
  std::vector<std::string> groups;
  std::vector<std::string> metrics;
  std::string out_dir = "plots";
};

fs::path metrics_path(const std::string& p) {
  const fs::path path(p);
  return fs::is_directory(path) ? path / "metrics.csv" : path;
}

int do_train(const TrainArgs& a, std::ostream& out) {
  TrainConfig c = TrainConfig::load(a.config);
  if (a.seed) c.seed = *a.seed;
  if (a.steps) c.total_steps = *a.steps;
  if (a.algorithm) c.algorithm = parse_algorithm(*a.algorithm);
  if (a.lambda) c.lambda = *a.lambda;
  c.validate();
  const fs::path dir = a.out_dir.empty()
                           ? fs::path("runs") / fmt::format("{}-{}-s{}", c.env.describe(), to_string(c.algorithm), c.seed)
                           : fs::path(a.out_dir);
  TrainOptions opt;
  if (!a.quiet) {
    opt.on_log = [&out](const MetricsRow& r) {
      out << fmt::format("step {:>9}  episodes {:>7}  return {:.4f}\n", r.step, r.episodes, r.return_sum);
      out.flush();
    };
  }
  const TrainResult r = train(c, dir, opt);
  out << fmt::format("run directory: {}\n", r.run_dir.string());
  out << fmt::format("steps {}  updates {}  episodes {}  final mean return {:.4f}\n", r.steps, r.updates, r.episodes,
                     r.final_return_sum);
  return kOk;
}

int do_evaluate(const EvalArgs& a, std::ostream& out) {
  fs::path ckpt = a.checkpoint;
  fs::path config = a.config;
  if (!a.run_dir.empty()) {
    if (ckpt.empty()) ckpt = latest_checkpoint(a.run_dir);
    if (config.empty()) config = fs::path(a.run_dir) / "config.ini";
  }
  if (ckpt.empty() || config.empty()) throw CLI::ValidationError("evaluate", "give --run or both --config and --checkpoint");
  const TrainConfig c = TrainConfig::load(config);
  const EvalResult r = evaluate(c, load_checkpoint(ckpt), a.episodes, a.seed, a.greedy);
  out << fmt::format("checkpoint: {}\nepisodes: {}\n", ckpt.string(), r.episodes);
  for (std::size_t i = 0; i < r.mean.size(); ++i) {
    out << fmt::format("agent {}: {:.4f} ± {:.4f}\n", i, r.mean[i], r.std[i]);
  }
  out << fmt::format("return (sum over agents): {:.4f} ± {:.4f}\n", r.sum_mean, r.sum_std);
  return kOk;
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
  verify::SuiteOptions opt;
  opt.random_games = a.random_games;
  opt.seed = a.seed;
  opt.mc_samples = a.mc_samples;
  const auto reports = verify::run_suite(opt);
  out << verify::format_reports(reports);
  const bool ok = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  out << (ok ? "all checks passed\n" : "verification FAILED\n");
  return ok ? kOk : kVerificationFailed;
}

int do_plot(const PlotArgs& a, std::ostream& out) {
  std::vector<plot::RunGroup> groups;
  for (const std::string& spec : a.groups) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw CLI::ValidationError("--group", "expected label=path[,path...]: " + spec);
    }
    plot::RunGroup g;
    g.label = spec.substr(0, eq);
    std::stringstream ss(spec.substr(eq + 1));
    for (std::string p; std::getline(ss, p, ',');) {
      if (!p.empty()) g.metrics_files.push_back(metrics_path(p));
    }
    groups.push_back(std::move(g));
  }
  if (!a.runs.empty()) {
    plot::RunGroup g;
    g.label = "runs";
    for (const auto& p : a.runs) g.metrics_files.push_back(metrics_path(p));
    groups.push_back(std::move(g));
  }
  if (groups.empty()) throw CLI::ValidationError("plot", "no runs given");
  for (const auto& p : plot::plot_groups(groups, a.out_dir, a.metrics)) out << p.string() << '\n';
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shared-experience actor-critic: training, evaluation, verification and plotting"};
  app.name(argv.empty() ? "seac" : fs::path(argv[0]).filename().string());
  app.require_subcommand(1, 1);
  app.footer(
      "Exit codes: 0 success, 1 verification failure, 2 bad arguments or config, "
      "3 runtime error (e.g. training diverged).");

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train on a config and write a run directory");
  train_cmd->add_option("-c,--config", ta.config, "INI config file")->required();
  train_cmd->add_option("-s,--seed", ta.seed, "Override [run] seed");
  train_cmd->add_option("--steps", ta.steps, "Override [run] total_steps");
  train_cmd->add_option("--algorithm", ta.algorithm, "Override [run] algorithm (iac, seac, snac, iql, seql)");
  train_cmd->add_option("--lambda", ta.lambda, "Override [actor_critic] lambda");
  train_cmd->add_option("-o,--out", ta.out_dir, "Run directory (default runs/<env>-<algorithm>-s<seed>)");
  train_cmd->add_flag("-q,--quiet", ta.quiet, "Do not print progress");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint and print mean ± std returns");
  eval_cmd->add_option("-c,--config", ea.config, "INI config file (default <run>/config.ini)");
  eval_cmd->add_option("--checkpoint", ea.checkpoint, "Checkpoint file (default: latest in <run>)");
  eval_cmd->add_option("-r,--run", ea.run_dir, "Run directory");
  eval_cmd->add_option("-n,--episodes", ea.episodes, "Episodes")->check(CLI::PositiveNumber);
  eval_cmd->add_option("-s,--seed", ea.seed, "Evaluation seed");
  eval_cmd->add_flag("--greedy", ea.greedy, "Act greedily (debugging only)");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Run the exact-enumeration oracle suite");
  verify_cmd->add_option("--random-games", va.random_games, "Number of random symmetric games")
      ->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("-s,--seed", va.seed, "Seed for the random games and policies");
  verify_cmd->add_option("--mc-samples", va.mc_samples, "Monte Carlo samples for the IS check")
      ->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 40));

  PlotArgs pa;
  auto* plot_cmd = app.add_subcommand("plot", "Plot learning curves (mean with std band across runs) as SVG");
  plot_cmd->add_option("runs", pa.runs, "Run directories or metrics.csv files, plotted as one group");
  plot_cmd->add_option("-g,--group", pa.groups, "label=path[,path...]; repeatable");
  plot_cmd->add_option("-m,--metric", pa.metrics, "Metric column(s) to plot (default: all with data)");
  plot_cmd->add_option("-o,--out", pa.out_dir, "Output directory");

  std::vector<std::string> rev(argv.rbegin(), argv.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    err << "run with --help for usage\n";
    return kUsageError;
  }

  try {
    if (*train_cmd) return do_train(ta, out);
    if (*eval_cmd) return do_evaluate(ea, out);
    if (*verify_cmd) return do_verify(va, out);
    if (*plot_cmd) return do_plot(pa, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DivergenceError& e) {
    err << "training diverged: " << e.what() << " (batch dumped to " << e.dump_path.string() << ")\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace seac::cli
