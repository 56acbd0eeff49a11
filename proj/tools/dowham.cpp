// Copyright 2026 The dowham Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dowham: command-line front end for training runs, behavioral studies,
// the bonus curve and trace recounting.
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 oracle mismatch.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dowham/agent/trajectory.hpp"
#include "dowham/cli/config.hpp"
#include "dowham/experiments/recount.hpp"
#include "dowham/experiments/run_logs.hpp"
#include "dowham/experiments/studies.hpp"
#include "dowham/gridworld/snapshot.hpp"
#include "dowham/intrinsic/counter_snapshot.hpp"

namespace fs = std::filesystem;
using namespace dowham;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitMismatch = 3;

/// Flags shared by every study command; each maps onto a config key.
struct StudyOptions {
  std::string config_path;
  std::map<std::string, std::string> values;
  bool overwrite = false;
  CLI::App* app = nullptr;

  void attach(CLI::App* sub, const std::vector<std::string>& aliases = {}) {
    app = sub;
    sub->add_option("--config", config_path, "config file ([section] key = value)")->check(CLI::ExistingFile);
    for (const auto& k : cli::kKeys) {
      const std::string key(k.key);
      if (key == "overwrite") continue;
      std::string names = "--" + key;
      for (const auto& a : aliases) {
        const auto colon = a.find(':');
        if (a.substr(0, colon) == key) names += ",--" + a.substr(colon + 1);
      }
      sub->add_option(names, values[key], std::string(k.help));
    }
    sub->add_flag("--overwrite", overwrite, "replace existing run directories instead of failing");
  }

  cli::RunConfig resolve() const {
    cli::ConfigMap m;
    if (!config_path.empty()) m = cli::load_config(config_path);
    for (const auto& [key, value] : values) {
      if (app->count("--" + key) > 0) cli::set_flag(m, key, value);
    }
    if (overwrite) cli::set_flag(m, "overwrite", "true");
    const char* env = std::getenv("DOWHAM_OUTPUT_ROOT");
    return cli::resolve(m, env && *env ? fs::path(env) : fs::path("runs"));
  }
};

unsigned workers_of(const cli::RunConfig& rc) {
  return rc.workers ? rc.workers : experiments::default_workers();
}

void write_counters(const fs::path& dir, const intrinsic::RewardEngine& engine) {
  experiments::write_file(dir / "counters.txt", [&](std::ostream& os) { intrinsic::write_counter_snapshot(os, engine); });
}

// ------------------------------------------------------------------- train

int cmd_train(const StudyOptions& opt, bool log_runs) {
  const cli::RunConfig rc = opt.resolve();
  struct Job {
    gridworld::TaskSpec task;
    intrinsic::EngineConfig engine;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& t : rc.tasks) {
    for (const auto& e : rc.engines) {
      for (auto s : rc.seeds) jobs.push_back({t, e, s});
    }
  }
  std::mutex out_mu;
  experiments::parallel_for(jobs.size(), workers_of(rc), [&](std::size_t i) {
    const Job& j = jobs[i];
    auto [ecfg, cfg] = experiments::seeded(j.engine, rc.train, j.seed);
    const fs::path dir = experiments::run_dir(rc.output, "train", gridworld::task_slug(j.task),
                                              intrinsic::to_string(ecfg.kind), j.seed);
    experiments::prepare_dir(dir, rc.policy);
    std::unique_ptr<std::ofstream> traj_file, trace_file;
    std::unique_ptr<agent::TrajectoryLogWriter> traj;
    std::unique_ptr<agent::RewardTraceWriter> trace;
    agent::TrainHooks hooks;
    if (log_runs) {
      traj_file = std::make_unique<std::ofstream>(dir / "trajectory.log", std::ios::binary | std::ios::trunc);
      trace_file = std::make_unique<std::ofstream>(dir / "trace.log", std::ios::binary | std::ios::trunc);
      if (!*traj_file || !*trace_file) throw IoError("cannot open log files in " + dir.string());
      traj = std::make_unique<agent::TrajectoryLogWriter>(*traj_file, j.task);
      trace = std::make_unique<agent::RewardTraceWriter>(*trace_file, ecfg);
      hooks = experiments::logging_hooks(*traj, *trace);
    }
    const auto rec = experiments::run_training(j.task, ecfg, cfg, hooks,
                                               [&](const intrinsic::RewardEngine& e) { write_counters(dir, e); });
    if (log_runs) {
      traj_file->flush();
      trace_file->flush();
      if (!*traj_file || !*trace_file) throw IoError("write failed for log files in " + dir.string());
    }
    experiments::write_run_artifacts(dir, rec, "train", experiments::OutputPolicy::overwrite);
    const double final_rate = rec.curve.empty() ? 0.0 : rec.curve.back().success_rate;
    std::lock_guard lock(out_mu);
    std::cout << dir.string() << ": final success " << format_double(final_rate) << ", " << rec.goal_events
              << " goals in " << rec.episodes << " episodes\n";
  });
  return kExitOk;
}

// -------------------------------------------------------------- rewardless

int cmd_rewardless(const StudyOptions& opt) {
  cli::RunConfig rc = opt.resolve();
  std::vector<experiments::RewardlessResult> results;
  struct Job {
    gridworld::TaskSpec task;
    intrinsic::EngineConfig engine;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& t : rc.tasks) {
    for (const auto& e : rc.engines) {
      for (auto s : rc.seeds) jobs.push_back({t, e, s});
    }
  }
  results.resize(jobs.size());
  for (const auto& t : rc.tasks) {
    experiments::prepare_dir(rc.output / "rewardless" / gridworld::task_slug(t), experiments::OutputPolicy::overwrite);
  }
  experiments::parallel_for(jobs.size(), workers_of(rc), [&](std::size_t i) {
    results[i] = experiments::rewardless_run(jobs[i].task, jobs[i].engine, rc.train.budget, jobs[i].seed, rc.train);
    experiments::write_run(rc.output, "rewardless", results[i].run, rc.policy);
  });
  for (const auto& t : rc.tasks) {
    const fs::path path = rc.output / "rewardless" / gridworld::task_slug(t) / "summary.csv";
    experiments::write_file(path, [&](std::ostream& os) {
      os << "engine,seed,steps,episodes,goal_events,collection_rate,E_pickup,E_drop,E_toggle,heatmap_total\n";
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!(jobs[i].task == t)) continue;
        const auto& r = results[i];
        const auto& e = r.actions.effective;
        os << intrinsic::to_string(jobs[i].engine.kind) << ',' << jobs[i].seed << ',' << rc.train.budget << ','
           << r.episodes << ',' << r.goal_events << ',' << format_double(r.extrinsic_collection_rate) << ','
           << e[static_cast<std::size_t>(gridworld::Action::pickup)] << ','
           << e[static_cast<std::size_t>(gridworld::Action::drop)] << ','
           << e[static_cast<std::size_t>(gridworld::Action::toggle)] << ',' << r.heatmap.total() << '\n';
      }
    });
    std::cout << path.string() << "\n";
  }
  return kExitOk;
}

// --------------------------------------------------------------- benchmark

int cmd_benchmark(const StudyOptions& opt) {
  const cli::RunConfig rc = opt.resolve();
  const auto res = experiments::benchmark(rc.tasks, rc.engines, rc.seeds, rc.train.budget, rc.train, workers_of(rc));
  for (const auto& r : res.runs) experiments::write_run(rc.output, "benchmark", r, rc.policy);
  const fs::path path = rc.output / "benchmark" / "aggregate.csv";
  experiments::write_file(path, [&](std::ostream& os) {
    os << experiments::kAggregateHeader << '\n';
    for (const auto& g : res.groups) experiments::write_aggregate_csv(os, g.task, g.engine, g.rows);
  });
  std::cout << path.string() << " (window " << res.window << " steps)\n";
  return kExitOk;
}

// ----------------------------------------------------------------- ballpit

int cmd_ballpit(const StudyOptions& opt) {
  const cli::RunConfig rc = opt.resolve();
  const auto study = experiments::ballpit_study(rc.levels, rc.engines, rc.seeds, rc.train.budget, rc.train, workers_of(rc));
  for (const auto& r : study.runs) experiments::write_run(rc.output, "ballpit", r, rc.policy);
  const fs::path path = rc.output / "ballpit" / "ballpit.csv";
  experiments::write_file(path, [&](std::ostream& os) { experiments::write_ballpit_csv(os, study); });
  std::cout << path.string() << "\n";
  return kExitOk;
}

// --------------------------------------------------------------- colormaze

int cmd_colormaze(const StudyOptions& opt) {
  const cli::RunConfig rc = opt.resolve();
  const auto study = experiments::colormaze_study(rc.engines, rc.seeds, rc.train.budget, rc.train, workers_of(rc));
  for (const auto& r : study.runs) experiments::write_run(rc.output, "colormaze", r, rc.policy);
  const fs::path path = rc.output / "colormaze" / "colormaze.csv";
  experiments::write_file(path, [&](std::ostream& os) { experiments::write_colormaze_csv(os, study); });
  std::cout << path.string() << "\n";
  return kExitOk;
}

// ------------------------------------------------------------- bonus curve

int cmd_bonus_curve(const std::string& etas_text, int resolution, const std::string& out_path) {
  std::vector<double> etas;
  for (const auto& s : cli::detail::split_list(etas_text, ',')) {
    double v = 0.0;
    if (!parse_double(s, v)) throw ConfigError("--eta: bad number '" + s + "'");
    etas.push_back(v);
  }
  if (etas.empty()) throw ConfigError("--eta: empty list");
  const auto rows = intrinsic::bonus_curve(etas, resolution);
  auto emit = [&](std::ostream& os) {
    os << "eta,ratio,bonus\n";
    for (const auto& r : rows) os << format_double(r.eta) << ',' << format_double(r.ratio) << ',' << format_double(r.bonus) << '\n';
  };
  if (out_path.empty() || out_path == "-") {
    emit(std::cout);
  } else {
    experiments::write_file(out_path, emit);
  }
  return kExitOk;
}

// ----------------------------------------------------------------- recount

int cmd_recount(const fs::path& target, bool replay, double tolerance) {
  fs::path dir = target;
  if (!fs::is_directory(target)) dir = target.parent_path();
  if (dir.empty()) dir = ".";
  const fs::path trace_path = fs::is_directory(target) ? dir / "trace.log" : target;
  const fs::path traj_path = dir / "trajectory.log";
  std::ifstream trace_in(trace_path);
  if (!trace_in) throw IoError("cannot read " + trace_path.string());
  std::ifstream traj_in(traj_path);
  if (!traj_in) throw IoError("cannot read " + traj_path.string());
  const auto trace = experiments::parse_trace_log(trace_in);
  const auto log = experiments::parse_trajectory_log(traj_in);
  const auto rep = experiments::recount(log, trace, replay, tolerance);
  std::cout << "mode " << (rep.mode == experiments::RecountMode::log ? "log" : "replay") << ", " << rep.transitions
            << " transitions, " << rep.mismatches << " mismatches, max |diff| " << format_double(rep.max_abs_diff)
            << "\n";
  if (!rep.ok()) {
    const auto& d = *rep.first;
    std::cerr << "first divergence at step " << d.step << " (trace line " << d.trace_line << "): " << d.field
              << " traced " << format_double(d.expected) << " recomputed " << format_double(d.recomputed) << "\n";
    return kExitMismatch;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- snapshot

int cmd_snapshot(const std::string& task_text, std::uint64_t seed) {
  std::cout << gridworld::to_snapshot(gridworld::make_world(gridworld::parse_task(task_text), seed));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dowham: action-effectiveness exploration bonus on gridworlds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dowham 1.0.0");

  StudyOptions train_opt, rewardless_opt, bench_opt, ballpit_opt, colormaze_opt;
  bool log_runs = false;
  auto* train = app.add_subcommand("train", "train a tabular agent and write curve, heatmap, actions and counters");
  train_opt.attach(train, {"seeds:seed"});
  train->add_flag("--log", log_runs, "also write trajectory.log and trace.log for recount");

  auto* rewardless = app.add_subcommand("rewardless", "train with the extrinsic reward withheld; report visits and actions");
  rewardless_opt.attach(rewardless, {"seeds:seed", "budget:steps"});

  auto* bench = app.add_subcommand("benchmark", "learning curves over tasks x engines x seeds with rolling mean/std");
  bench_opt.attach(bench, {"seeds:seed"});

  auto* ballpit = app.add_subcommand("ballpit", "steps-to-0.8-success for each BallPit level and engine");
  ballpit_opt.attach(ballpit, {"seeds:seed"});

  auto* colormaze = app.add_subcommand("colormaze", "ColorMaze learning progress and intrinsic reward density");
  colormaze_opt.attach(colormaze, {"seeds:seed"});

  std::string etas = "2,10,40,100";
  int resolution = 101;
  std::string curve_out;
  auto* curve = app.add_subcommand("bonus-curve", "tabulate the bonus against the effectiveness ratio");
  curve->add_option("--eta", etas, "comma-separated eta values (each > 1)")->capture_default_str();
  curve->add_option("--resolution", resolution, "ratios per eta, evenly spaced in [0, 1]")->capture_default_str();
  curve->add_option("--out", curve_out, "output CSV (default: stdout)");

  std::string recount_target;
  bool replay = false;
  double tolerance = 1e-6;
  auto* rc = app.add_subcommand("recount", "re-derive every intrinsic reward from a run's logs and diff the trace");
  rc->add_option("path", recount_target, "run directory or its trace.log")->required();
  rc->add_flag("--replay", replay, "regenerate worlds and replay actions even when the log suffices");
  rc->add_option("--tolerance", tolerance, "allowed |diff| in replay mode")->capture_default_str();

  std::string snap_task = "multiroom:2,4";
  std::uint64_t snap_seed = 0;
  auto* snap = app.add_subcommand("snapshot", "print a generated map in the text snapshot format");
  snap->add_option("--task", snap_task, "task spec")->capture_default_str();
  snap->add_option("--seed", snap_seed, "generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) return cmd_train(train_opt, log_runs);
    if (*rewardless) return cmd_rewardless(rewardless_opt);
    if (*bench) return cmd_benchmark(bench_opt);
    if (*ballpit) return cmd_ballpit(ballpit_opt);
    if (*colormaze) return cmd_colormaze(colormaze_opt);
    if (*curve) return cmd_bonus_curve(etas, resolution, curve_out);
    if (*rc) return cmd_recount(recount_target, replay, tolerance);
    if (*snap) return cmd_snapshot(snap_task, snap_seed);
  } catch (const OracleMismatch& e) {
    std::cerr << "oracle mismatch: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
