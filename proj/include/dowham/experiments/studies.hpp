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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dowham/agent/trainer.hpp"
#include "dowham/errors.hpp"
#include "dowham/experiments/action_report.hpp"
#include "dowham/experiments/curves.hpp"
#include "dowham/experiments/heatmap.hpp"
#include "dowham/experiments/output.hpp"
#include "dowham/experiments/parallel.hpp"
#include "dowham/gridworld/generators.hpp"
#include "dowham/intrinsic/reward_engine.hpp"

namespace dowham::experiments {

using gridworld::TaskSpec;
using intrinsic::EngineConfig;
using intrinsic::EngineKind;

/// Everything one (task, engine, seed) training run produced.
struct RunRecord {
  TaskSpec task;
  EngineConfig engine;
  agent::TrainConfig train;
  Curve curve;
  VisitHeatmap heatmap;
  ActionDistributionReport actions;
  std::uint64_t episodes = 0;
  std::uint64_t goal_events = 0;
  std::uint64_t intrinsic_nonzero = 0;  // transitions with r_i != 0
  std::uint64_t steps = 0;

  std::uint64_t seed() const { return train.seed; }
  /// Goal events per completed episode.
  double collection_rate() const {
    return episodes ? static_cast<double>(goal_events) / static_cast<double>(episodes) : 0.0;
  }
};

/// Trains one run, recording visits (agent cell before each action) and
/// action effectiveness. `extra` hooks run after the built-in ones.
/// `finish` sees the engine after training (e.g. to snapshot its counters).
inline RunRecord run_training(const agent::EnvFactory& factory, const TaskSpec& task, EngineConfig engine_cfg,
                              const agent::TrainConfig& cfg, const agent::TrainHooks& extra = {},
                              const std::function<void(const intrinsic::RewardEngine&)>& finish = {}) {
  intrinsic::RewardEngine engine(engine_cfg);
  RunRecord rec;
  rec.task = task;
  rec.engine = engine_cfg;
  rec.train = cfg;
  agent::TrainHooks hooks;
  hooks.on_episode_start = [&](std::uint64_t ep, std::uint64_t seed, const gridworld::GridWorld& w) {
    if (rec.heatmap.counts.empty()) {
      rec.heatmap = VisitHeatmap(w.width, w.height);
    } else if (rec.heatmap.width != w.width || rec.heatmap.height != w.height) {
      throw ContractViolation("run_training: task produced worlds of different sizes");
    }
    if (extra.on_episode_start) extra.on_episode_start(ep, seed, w);
  };
  hooks.on_step = [&](const agent::StepEvent& e) {
    rec.heatmap.add(e.position.x, e.position.y);
    if (e.intrinsic.reward != 0.0) ++rec.intrinsic_nonzero;
    if (extra.on_step) extra.on_step(e);
  };
  agent::TrainResult r = agent::train(factory, engine, cfg, hooks);
  rec.curve = std::move(r.curve);
  rec.actions = make_action_report(r.action_stats);
  rec.episodes = r.episodes_completed;
  rec.goal_events = r.goal_events;
  rec.steps = cfg.budget;
  if (finish) finish(engine);
  return rec;
}

inline RunRecord run_training(const TaskSpec& task, EngineConfig engine_cfg, const agent::TrainConfig& cfg,
                              const agent::TrainHooks& extra = {},
                              const std::function<void(const intrinsic::RewardEngine&)>& finish = {}) {
  return run_training(agent::run_factory(task, cfg.seed), task, engine_cfg, cfg, extra, finish);
}

/// Engine and trainer seeds for one run of a multi-seed study.
inline std::pair<EngineConfig, agent::TrainConfig> seeded(EngineConfig engine, agent::TrainConfig cfg,
                                                          std::uint64_t seed) {
  engine.seed = seed;
  cfg.seed = seed;
  return {engine, cfg};
}

// ---------------------------------------------------------------- rewardless

struct RewardlessResult {
  VisitHeatmap heatmap;
  ActionDistributionReport actions;
  double extrinsic_collection_rate = 0.0;
  std::uint64_t episodes = 0;
  std::uint64_t goal_events = 0;
  RunRecord run;
};

/// Trains with the extrinsic reward withheld from the learner; goal events
/// are still counted (and still end the episode).
inline RewardlessResult rewardless_run(const TaskSpec& task, EngineConfig engine, std::uint64_t total_steps,
                                       std::uint64_t seed, agent::TrainConfig base = {}) {
  if (total_steps < 1) throw ContractViolation("rewardless_run: total_steps must be >= 1");
  base.budget = total_steps;
  base.rewardless = true;
  base.eval_every = 0;
  auto [e, cfg] = seeded(engine, base, seed);
  RewardlessResult out;
  out.run = run_training(task, e, cfg);
  out.heatmap = out.run.heatmap;
  out.actions = out.run.actions;
  out.episodes = out.run.episodes;
  out.goal_events = out.run.goal_events;
  out.extrinsic_collection_rate = out.run.collection_rate();
  return out;
}

// ----------------------------------------------------------------- benchmark

struct BenchmarkResult {
  std::vector<RunRecord> runs;  // task-major, then engine, then seed
  struct Group {
    std::string task;
    std::string engine;
    std::vector<AggregateRow> rows;
  };
  std::vector<Group> groups;
  std::uint64_t window = 0;
};

/// Every (task, engine, seed) combination, fanned out over `workers` threads.
inline std::vector<RunRecord> run_grid(const std::vector<TaskSpec>& tasks, const std::vector<EngineConfig>& engines,
                                       const std::vector<std::uint64_t>& seeds, const agent::TrainConfig& base,
                                       unsigned workers) {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  const std::size_t n = tasks.size() * engines.size() * seeds.size();
  std::vector<RunRecord> runs(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const std::size_t s = i % seeds.size();
    const std::size_t e = (i / seeds.size()) % engines.size();
    const std::size_t t = i / (seeds.size() * engines.size());
    auto [ecfg, cfg] = seeded(engines[e], base, seeds[s]);
    runs[i] = run_training(tasks[t], ecfg, cfg);
  });
  return runs;
}

inline BenchmarkResult benchmark(const std::vector<TaskSpec>& tasks, const std::vector<EngineConfig>& engines,
                                 const std::vector<std::uint64_t>& seeds, std::uint64_t budget,
                                 agent::TrainConfig base = {}, unsigned workers = default_workers()) {
  base.budget = budget;
  BenchmarkResult out;
  out.window = rolling_window(budget);
  out.runs = run_grid(tasks, engines, seeds, base, workers);
  for (std::size_t g = 0; g < tasks.size() * engines.size(); ++g) {
    std::vector<Curve> curves;
    for (std::size_t s = 0; s < seeds.size(); ++s) curves.push_back(out.runs[g * seeds.size() + s].curve);
    const auto& first = out.runs[g * seeds.size()];
    out.groups.push_back({gridworld::task_slug(first.task), std::string(intrinsic::to_string(first.engine.kind)),
                          curves.front().empty() ? std::vector<AggregateRow>{} : aggregate_curves(curves, out.window)});
  }
  return out;
}

// ------------------------------------------------------------------- ballpit

/// Steps-to-success value for runs that never reach the threshold.
inline constexpr std::int64_t kUnsolved = -1;

struct BallPitRow {
  gridworld::BallPitLevel level = gridworld::BallPitLevel::no_ball;
  EngineKind engine = EngineKind::none;
  std::uint64_t seed = 0;
  std::int64_t steps_to_success = kUnsolved;
};

struct BallPitStudy {
  std::vector<BallPitRow> rows;  // level-major, then engine, then seed
  std::vector<RunRecord> runs;   // parallel to rows
  double threshold = 0.8;
};

inline std::int64_t steps_to(const Curve& curve, double threshold) {
  const auto s = agent::steps_to_success(curve, threshold);
  return s ? static_cast<std::int64_t>(*s) : kUnsolved;
}

inline BallPitStudy ballpit_study(const std::vector<gridworld::BallPitLevel>& levels,
                                  const std::vector<EngineConfig>& engines, const std::vector<std::uint64_t>& seeds,
                                  std::uint64_t budget, agent::TrainConfig base = {},
                                  unsigned workers = default_workers(), double threshold = 0.8) {
  base.budget = budget;
  std::vector<TaskSpec> tasks;
  for (auto l : levels) tasks.push_back(TaskSpec::ballpit(l));
  BallPitStudy out;
  out.threshold = threshold;
  out.runs = run_grid(tasks, engines, seeds, base, workers);
  for (const auto& r : out.runs) {
    out.rows.push_back({r.task.level, r.engine.kind, r.seed(), steps_to(r.curve, threshold)});
  }
  return out;
}

inline void write_ballpit_csv(std::ostream& os, const BallPitStudy& s) {
  os << "level,engine,seed,steps_to_success\n";
  for (const auto& r : s.rows) {
    os << gridworld::to_string(r.level) << ',' << intrinsic::to_string(r.engine) << ',' << r.seed << ','
       << r.steps_to_success << '\n';
  }
}

// ----------------------------------------------------------------- colormaze

struct ColorMazeRow {
  EngineKind engine = EngineKind::none;
  std::uint64_t seed = 0;
  std::int64_t steps_to_success = kUnsolved;
  double final_success = 0.0;
  double collection_rate = 0.0;
  /// Fraction of transitions with a nonzero intrinsic reward.
  double intrinsic_density = 0.0;
  std::uint64_t toggle_effective = 0;
};

struct ColorMazeStudy {
  std::vector<ColorMazeRow> rows;
  std::vector<RunRecord> runs;
};

/// Trains each engine on ColorMaze (extrinsic reward on) and reports
/// learning progress alongside how sparse each engine's bonus is.
inline ColorMazeStudy colormaze_study(const std::vector<EngineConfig>& engines, const std::vector<std::uint64_t>& seeds,
                                      std::uint64_t budget, agent::TrainConfig base = {},
                                      unsigned workers = default_workers(), double threshold = 0.8) {
  base.budget = budget;
  ColorMazeStudy out;
  out.runs = run_grid({TaskSpec::colormaze()}, engines, seeds, base, workers);
  for (const auto& r : out.runs) {
    ColorMazeRow row;
    row.engine = r.engine.kind;
    row.seed = r.seed();
    row.steps_to_success = steps_to(r.curve, threshold);
    row.final_success = r.curve.empty() ? 0.0 : r.curve.back().success_rate;
    row.collection_rate = r.collection_rate();
    row.intrinsic_density = r.steps ? static_cast<double>(r.intrinsic_nonzero) / static_cast<double>(r.steps) : 0.0;
    row.toggle_effective = r.actions.effective[static_cast<std::size_t>(gridworld::Action::toggle)];
    out.rows.push_back(row);
  }
  return out;
}

inline void write_colormaze_csv(std::ostream& os, const ColorMazeStudy& s) {
  os << "engine,seed,steps_to_success,final_success,collection_rate,intrinsic_density,toggle_effective\n";
  for (const auto& r : s.rows) {
    os << intrinsic::to_string(r.engine) << ',' << r.seed << ',' << r.steps_to_success << ','
       << format_double(r.final_success) << ',' << format_double(r.collection_rate) << ','
       << format_double(r.intrinsic_density) << ',' << r.toggle_effective << '\n';
  }
}

// --------------------------------------------------------------- forced path

struct TraceRow {
  int t = 0;
  gridworld::Action action = gridworld::Action::done;
  bool state_changed = false;
  double extrinsic = 0.0;
  intrinsic::IntrinsicSample intrinsic;
};

/// Replays a fixed action script and records the engine's rewards; no learning.
/// Throws ContractViolation if the script continues past the end of the episode.
inline std::vector<TraceRow> forced_path_trace(const std::vector<gridworld::Action>& script, gridworld::GridWorld world,
                                               intrinsic::RewardEngine& engine) {
  std::vector<TraceRow> out;
  out.reserve(script.size());
  gridworld::Observation obs = gridworld::observe(world);
  gridworld::StateHash s = gridworld::canonical_hash(world);
  std::uint64_t o = gridworld::observation_hash(obs);
  engine.begin_episode(s, o);
  int t = 0;
  for (const auto a : script) {
    if (world.terminated()) throw ContractViolation("forced_path_trace: script continues after the episode ended");
    auto r = gridworld::step(world, a);
    const gridworld::StateHash s2 = gridworld::canonical_hash(world);
    const std::uint64_t o2 = gridworld::observation_hash(r.observation);
    const auto sample = engine.intrinsic({s, s2, o, o2, a, &r.observation});
    out.push_back({t++, a, s != s2, r.reward, sample});
    s = s2;
    o = o2;
  }
  return out;
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "t,action,state_changed,extrinsic,intrinsic,bonus,visits\n";
  for (const auto& r : rows) {
    os << r.t << ',' << gridworld::to_string(r.action) << ',' << (r.state_changed ? 1 : 0) << ','
       << format_double(r.extrinsic) << ',' << format_double(r.intrinsic.reward) << ','
       << format_double(r.intrinsic.bonus) << ',' << r.intrinsic.visits << '\n';
  }
}

// ----------------------------------------------------------------- artifacts

/// curve.csv, heatmap.csv, heatmap.pgm, actions.csv and meta.txt for one run.
inline void write_run_artifacts(const std::filesystem::path& dir, const RunRecord& r, std::string_view study,
                                OutputPolicy policy) {
  prepare_dir(dir, policy);
  write_file(dir / "curve.csv", [&](std::ostream& os) { write_curve_csv(os, r.curve); });
  if (!r.heatmap.counts.empty()) export_heatmap(r.heatmap, dir / "heatmap");
  write_file(dir / "actions.csv", [&](std::ostream& os) { write_actions_csv(os, r.actions); });
  write_meta(dir / "meta.txt", {
                                   {"study", std::string(study)},
                                   {"task", gridworld::to_string(r.task)},
                                   {"engine", std::string(intrinsic::to_string(r.engine.kind))},
                                   {"eta", format_double(r.engine.eta)},
                                   {"beta", format_double(r.engine.beta)},
                                   {"seed", std::to_string(r.seed())},
                                   {"budget", std::to_string(r.train.budget)},
                                   {"state_key", std::string(agent::to_string(r.train.state_key))},
                                   {"episodes", std::to_string(r.episodes)},
                                   {"goal_events", std::to_string(r.goal_events)},
                               });
}

inline std::filesystem::path write_run(const std::filesystem::path& root, std::string_view study, const RunRecord& r,
                                       OutputPolicy policy) {
  const auto dir =
      run_dir(root, study, gridworld::task_slug(r.task), intrinsic::to_string(r.engine.kind), r.seed());
  write_run_artifacts(dir, r, study, policy);
  return dir;
}

}  // namespace dowham::experiments
