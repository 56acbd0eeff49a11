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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dowham/experiments/action_report.hpp"
#include "dowham/experiments/curves.hpp"
#include "dowham/experiments/heatmap.hpp"
#include "dowham/experiments/output.hpp"
#include "dowham/experiments/parallel.hpp"
#include "dowham/experiments/recount.hpp"
#include "dowham/experiments/run_logs.hpp"
#include "dowham/experiments/studies.hpp"

namespace {

using namespace dowham;
using namespace dowham::experiments;
namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dowham_test_" + name);
  fs::remove_all(p);
  return p;
}

agent::TrainConfig small_config(std::uint64_t budget) {
  agent::TrainConfig c;
  c.budget = budget;
  c.eval_every = budget / 4;
  c.eval_episodes = 3;
  return c;
}

// ---------------------------------------------------------------- heatmap

TEST(Heatmap, CsvExample) {
  VisitHeatmap h(2, 2);
  h.at(0, 0) = 1;
  h.at(1, 1) = 3;
  std::ostringstream os;
  write_heatmap_csv(os, h);
  EXPECT_EQ(os.str(), "1,0\n0,3\n");
  std::istringstream is(os.str());
  EXPECT_EQ(parse_heatmap_csv(is), h);
}

TEST(Heatmap, EmptyIsAllBlack) {
  VisitHeatmap h(3, 2);
  std::ostringstream os;
  write_heatmap_pgm(os, h);
  EXPECT_EQ(os.str(), "P2\n3 2\n255\n0 0 0\n0 0 0\n");
}

TEST(Heatmap, LogScaledIntensity) {
  VisitHeatmap h(3, 1);
  h.at(1, 0) = 1;
  h.at(2, 0) = 99;
  std::ostringstream os;
  write_heatmap_pgm(os, h);
  const int mid = static_cast<int>(std::lround(255.0 * std::log(2.0) / std::log(100.0)));
  EXPECT_EQ(os.str(), "P2\n3 1\n255\n0 " + std::to_string(mid) + " 255\n");
}

TEST(Heatmap, RoundTripRandomCounts) {
  VisitHeatmap h(7, 5);
  Rng rng(2);
  for (auto& c : h.counts) c = rng.uniform_int(0, 1000000);
  std::stringstream ss;
  write_heatmap_csv(ss, h);
  EXPECT_EQ(parse_heatmap_csv(ss), h);
}

TEST(Heatmap, ErrorsAndMerge) {
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(parse_heatmap_csv(ragged), IoError);
  std::istringstream bad("1,x\n");
  EXPECT_THROW(parse_heatmap_csv(bad), IoError);
  VisitHeatmap a(2, 2);
  a.add(1, 1);
  VisitHeatmap b = a;
  b.merge(a);
  EXPECT_EQ(b.at(1, 1), 2u);
  EXPECT_THROW(b.merge(VisitHeatmap(3, 2)), ContractViolation);
  EXPECT_THROW(a.add(2, 0), ContractViolation);
  EXPECT_THROW(export_heatmap(a, "/nonexistent-dir/x/heatmap"), IoError);
}

TEST(Heatmap, ExportWritesBothFiles) {
  const auto dir = scratch_dir("heatmap");
  fs::create_directories(dir);
  VisitHeatmap h(2, 2);
  h.at(0, 1) = 4;
  export_heatmap(h, dir / "heatmap");
  EXPECT_TRUE(fs::exists(dir / "heatmap.csv"));
  EXPECT_TRUE(fs::exists(dir / "heatmap.pgm"));
  fs::remove_all(dir);
}

// ---------------------------------------------------------- action report

TEST(ActionReport, SharesSumToOne) {
  intrinsic::ActionStats s;
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) s.record(static_cast<gridworld::Action>(rng.index(7)), rng.bernoulli(0.3));
  const auto r = make_action_report(s);
  double u = 0.0;
  double e = 0.0;
  for (std::size_t a = 0; a < 7; ++a) {
    u += r.usage_share[a];
    e += r.effective_share[a];
    EXPECT_LE(r.effective[a], r.usage[a]);
  }
  EXPECT_NEAR(u, 1.0, 1e-9);
  EXPECT_NEAR(e, 1.0, 1e-9);
}

TEST(ActionReport, RejectsImpossibleCountsAndMerges) {
  intrinsic::ActionStats s;
  s.effective[0] = 2;
  s.usage[0] = 1;
  EXPECT_THROW(make_action_report(s), ContractViolation);
  intrinsic::ActionStats t;
  t.record(gridworld::Action::toggle, true);
  const auto m = merge_action_reports({make_action_report(t), make_action_report(t)});
  EXPECT_EQ(m.usage[5], 2u);
  EXPECT_EQ(m.effective[5], 2u);
  EXPECT_DOUBLE_EQ(m.usage_share[5], 1.0);
}

TEST(ActionReport, CsvHeader) {
  std::ostringstream os;
  write_actions_csv(os, make_action_report({}));
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "action,usage,effective,usage_share,effective_share");
}

// ------------------------------------------------------------------ curves

TEST(Curves, CsvRoundTripAndHeader) {
  const Curve c{{100, 0.25, 0.1, 3}, {200, 1.0, 0.93125, 3}};
  std::stringstream ss;
  write_curve_csv(ss, c);
  EXPECT_EQ(ss.str(), "step,success_rate,mean_extrinsic_return,seed\n100,0.25,0.1,3\n200,1,0.93125,3\n");
  EXPECT_EQ(parse_curve_csv(ss), c);
  std::istringstream headerless("100,0.25,0.1,3\n");
  EXPECT_THROW(parse_curve_csv(headerless), IoError);
}

TEST(Curves, RollingMeanWindow) {
  const Curve c{{1000, 0.0, 0, 1}, {2000, 1.0, 0, 1}, {3000, 0.5, 0, 1}};
  const auto r = rolling_mean(c, 2000);
  EXPECT_DOUBLE_EQ(r[0].success_rate, 0.0);
  EXPECT_DOUBLE_EQ(r[1].success_rate, 0.5);
  EXPECT_DOUBLE_EQ(r[2].success_rate, 0.75);
  EXPECT_EQ(rolling_window(1'000'000), 40'000u);
  EXPECT_EQ(rolling_window(10'000), 1'000u);
}

TEST(Curves, AggregateMeanAndStd) {
  const Curve a{{1000, 0.0, 0.0, 1}, {2000, 1.0, 0.5, 1}};
  const Curve b{{1000, 1.0, 0.0, 2}, {2000, 1.0, 0.7, 2}};
  const auto rows = aggregate_curves({a, b}, 1);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0].success_mean, 0.5);
  EXPECT_DOUBLE_EQ(rows[0].success_std, 0.5);
  EXPECT_DOUBLE_EQ(rows[1].return_mean, 0.6);
  EXPECT_NEAR(rows[1].return_std, 0.1, 1e-12);
  EXPECT_EQ(rows[1].seeds, 2u);
  const auto single = aggregate_curves({a}, 1);
  for (const auto& r : single) {
    EXPECT_EQ(r.success_std, 0.0);
    EXPECT_EQ(r.return_std, 0.0);
  }
  EXPECT_THROW(aggregate_curves({a, Curve{{1000, 0, 0, 2}}}, 1), ContractViolation);
}

// ----------------------------------------------------------------- studies

TEST(Rewardless, HeatmapConservesSteps) {
  for (auto kind : {EngineKind::none, EngineKind::dowham, EngineKind::count, EngineKind::rnd}) {
    EngineConfig e;
    e.kind = kind;
    const auto r = rewardless_run(gridworld::TaskSpec::playground(), e, 100, 1);
    EXPECT_EQ(r.heatmap.total(), 100u);
    EXPECT_EQ(r.actions.total_usage(), 100u);
    EXPECT_GE(r.extrinsic_collection_rate, 0.0);
    EXPECT_LE(r.extrinsic_collection_rate, 1.0);
  }
  EXPECT_THROW(rewardless_run(gridworld::TaskSpec::playground(), EngineConfig{}, 0, 1), ContractViolation);
}

TEST(Rewardless, GoalsStillCountedOnKeyCorridor) {
  EngineConfig e;
  e.kind = EngineKind::none;
  const auto r = rewardless_run(gridworld::parse_task("multiroom:2,4"), e, 20000, 3);
  EXPECT_GT(r.episodes, 0u);
  EXPECT_GT(r.goal_events, 0u);
  EXPECT_EQ(r.heatmap.total(), 20000u);
}

TEST(Benchmark, SingleSeedHasZeroSpreadAndIsDeterministic) {
  const std::vector<TaskSpec> tasks{gridworld::parse_task("multiroom:2,4")};
  EngineConfig none;
  none.kind = EngineKind::none;
  const std::vector<EngineConfig> engines{none, EngineConfig{}};
  const auto a = benchmark(tasks, engines, {1}, 2000, small_config(2000), 1);
  ASSERT_EQ(a.groups.size(), 2u);
  for (const auto& g : a.groups) {
    ASSERT_EQ(g.rows.size(), 4u);
    for (const auto& r : g.rows) EXPECT_EQ(r.success_std, 0.0);
  }
  const auto b = benchmark(tasks, engines, {1}, 2000, small_config(2000), 2);
  for (std::size_t i = 0; i < a.runs.size(); ++i) EXPECT_EQ(a.runs[i].curve, b.runs[i].curve);
  EXPECT_EQ(a.groups[1].engine, "dowham");
}

TEST(Benchmark, GridOrderIsTaskEngineSeed) {
  const std::vector<TaskSpec> tasks{gridworld::parse_task("multiroom:2,4"), gridworld::parse_task("keycorridor:3,1")};
  EngineConfig count;
  count.kind = EngineKind::count;
  const auto runs = run_grid(tasks, {EngineConfig{}, count}, {4, 5}, small_config(400), 2);
  ASSERT_EQ(runs.size(), 8u);
  EXPECT_EQ(runs[0].task, tasks[0]);
  EXPECT_EQ(runs[0].seed(), 4u);
  EXPECT_EQ(runs[1].seed(), 5u);
  EXPECT_EQ(runs[2].engine.kind, EngineKind::count);
  EXPECT_EQ(runs[4].task, tasks[1]);
  EXPECT_THROW(run_grid(tasks, {count}, {}, small_config(400), 1), ConfigError);
}

TEST(BallPit, StudyRowsAndCsv) {
  const auto s = ballpit_study({gridworld::BallPitLevel::no_ball, gridworld::BallPitLevel::max}, {EngineConfig{}}, {1},
                               800, small_config(800), 1);
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_EQ(s.rows[1].level, gridworld::BallPitLevel::max);
  std::ostringstream os;
  write_ballpit_csv(os, s);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "level,engine,seed,steps_to_success");
  EXPECT_EQ(steps_to({{10, 0.5, 0, 1}}, 0.8), kUnsolved);
}

TEST(ColorMaze, StudyKeepsTopologyPerRun) {
  EngineConfig none;
  none.kind = EngineKind::none;
  const auto s = colormaze_study({none}, {2}, 2000, small_config(2000), 1);
  ASSERT_EQ(s.rows.size(), 1u);
  EXPECT_EQ(s.rows[0].intrinsic_density, 0.0);
  const auto f = agent::run_factory(gridworld::TaskSpec::colormaze(), 2);
  const auto a = f(10);
  const auto b = f(11);
  for (std::size_t i = 0; i < a.cells.size(); ++i) ASSERT_EQ(a.cells[i].kind, b.cells[i].kind);
}

// ------------------------------------------------------------- forced path

gridworld::GridWorld interaction_room() {
  gridworld::GridWorld w(14, 14);
  gridworld::detail::carve(w, gridworld::Rect{0, 0, 14, 14});
  w.agent = gridworld::AgentPose{7, 7, gridworld::Direction::north};
  w.at(7, 4) = gridworld::Cell::box(gridworld::Color::red, gridworld::Color::yellow);
  w.max_steps = 100;
  return w;
}

std::vector<gridworld::Action> interaction_script() {
  using gridworld::Action;
  return {Action::toggle, Action::toggle,       Action::pickup, Action::pickup,
          Action::move_forward, Action::toggle, Action::move_forward, Action::toggle,
          Action::pickup, Action::turn_left};
}

TEST(ForcedPath, NoneEngineIsSilent) {
  EngineConfig none;
  none.kind = EngineKind::none;
  intrinsic::RewardEngine e(none);
  const auto script = interaction_script();
  const auto rows = forced_path_trace(script, interaction_room(), e);
  ASSERT_EQ(rows.size(), script.size());
  for (const auto& r : rows) EXPECT_EQ(r.intrinsic.reward, 0.0);
}

TEST(ForcedPath, DowhamPaysOnlyForRareEffectiveInteractions) {
  intrinsic::RewardEngine e(EngineConfig{});
  const auto rows = forced_path_trace(interaction_script(), interaction_room(), e);
  double interaction = 0.0;
  for (const auto& r : rows) {
    const bool interact = r.action == gridworld::Action::toggle || r.action == gridworld::Action::pickup;
    if (interact) {
      interaction += r.intrinsic.reward;
    } else {
      EXPECT_EQ(r.intrinsic.reward, 0.0) << r.t;
    }
  }
  EXPECT_GT(rows[7].intrinsic.reward, 0.0);  // box opened
  EXPECT_GT(rows[8].intrinsic.reward, 0.0);  // key picked up
  EXPECT_GT(interaction, 0.0);
}

TEST(ForcedPath, ScriptPastEpisodeEndIsRejected) {
  intrinsic::RewardEngine e(EngineConfig{});
  auto w = interaction_room();
  w.max_steps = 2;
  EXPECT_THROW(forced_path_trace(interaction_script(), w, e), ContractViolation);
  std::ostringstream os;
  write_trace_csv(os, {});
  EXPECT_EQ(os.str(), "t,action,state_changed,extrinsic,intrinsic,bonus,visits\n");
}

// ------------------------------------------------------------------ output

TEST(Output, DirectoryPolicyAndMeta) {
  const auto root = scratch_dir("output");
  const auto dir = run_dir(root, "train", "multiroom-2-4", "dowham", 3);
  EXPECT_EQ(dir, root / "train" / "multiroom-2-4" / "dowham" / "3");
  prepare_dir(dir, OutputPolicy::fail_if_exists);
  write_meta(dir / "meta.txt", {{"seed", "3"}});
  EXPECT_THROW(prepare_dir(dir, OutputPolicy::fail_if_exists), IoError);
  EXPECT_NO_THROW(prepare_dir(dir, OutputPolicy::overwrite));
  std::ifstream in(dir / "meta.txt");
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(first, "seed 3");
  EXPECT_EQ(second.rfind("created ", 0), 0u);
  EXPECT_THROW(write_file("/nonexistent-dir/x.csv", [](std::ostream&) {}), IoError);
  fs::remove_all(root);
}

TEST(Output, RunArtifactsAreComplete) {
  const auto root = scratch_dir("artifacts");
  const auto rec = run_training(gridworld::parse_task("multiroom:2,4"), EngineConfig{}, small_config(400));
  const auto dir = write_run(root, "train", rec, OutputPolicy::fail_if_exists);
  for (const char* f : {"curve.csv", "heatmap.csv", "heatmap.pgm", "actions.csv", "meta.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  std::ifstream hm(dir / "heatmap.csv");
  EXPECT_EQ(parse_heatmap_csv(hm).total(), 400u);
  fs::remove_all(root);
}

TEST(Parallel, RethrowsFirstFailureByIndex) {
  std::vector<int> hit(10, 0);
  try {
    parallel_for(10, 3, [&](std::size_t i) {
      hit[i] = 1;
      if (i == 4 || i == 7) throw std::runtime_error("job " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "job 4");
  }
  for (int h : hit) EXPECT_EQ(h, 1);
}

// ----------------------------------------------------------------- recount

struct LoggedRun {
  std::string trajectory;
  std::string trace;
};

LoggedRun logged_run(const char* task, EngineConfig engine, std::uint64_t budget, std::uint64_t seed) {
  std::ostringstream traj, trace;
  auto [ecfg, cfg] = seeded(engine, small_config(budget), seed);
  agent::TrajectoryLogWriter tw(traj, gridworld::parse_task(task));
  agent::RewardTraceWriter rw(trace, ecfg);
  run_training(gridworld::parse_task(task), ecfg, cfg, logging_hooks(tw, rw));
  return {traj.str(), trace.str()};
}

RecountReport recount_text(const LoggedRun& r, bool replay = false) {
  std::istringstream a(r.trajectory), b(r.trace);
  return recount(parse_trajectory_log(a), parse_trace_log(b), replay);
}

TEST(Recount, DowhamAndCountAreBitExact) {
  for (auto kind : {EngineKind::dowham, EngineKind::count, EngineKind::none}) {
    EngineConfig e;
    e.kind = kind;
    const auto run = logged_run("keycorridor:3,1", e, 3000, 2);
    const auto rep = recount_text(run);
    EXPECT_EQ(rep.mode, RecountMode::log);
    EXPECT_EQ(rep.transitions, 3000u);
    EXPECT_TRUE(rep.ok()) << intrinsic::to_string(kind);
    EXPECT_EQ(rep.max_abs_diff, 0.0);
    EXPECT_TRUE(recount_text(run, true).ok());
  }
}

TEST(Recount, RndReplayWithinTolerance) {
  EngineConfig e;
  e.kind = EngineKind::rnd;
  const auto rep = recount_text(logged_run("multiroom:2,4", e, 1500, 4));
  EXPECT_EQ(rep.mode, RecountMode::replay);
  EXPECT_TRUE(rep.ok());
  EXPECT_LE(rep.max_abs_diff, 1e-6);
}

TEST(Recount, ObservationEffectModeReplays) {
  EngineConfig e;
  e.effect = intrinsic::EffectMode::observation;
  const auto rep = recount_text(logged_run("colormaze", e, 1500, 4));
  EXPECT_EQ(rep.mode, RecountMode::replay);
  EXPECT_TRUE(rep.ok());
}

TEST(Recount, TamperedTraceIsReported) {
  auto run = logged_run("keycorridor:3,1", EngineConfig{}, 2000, 2);
  // Bump the first nonzero r_i in the trace.
  std::istringstream in(run.trace);
  std::ostringstream out;
  std::string line;
  bool done = false;
  while (std::getline(in, line)) {
    if (!done && line[0] != '#') {
      std::istringstream ls(line);
      std::string t, re, ri, rest;
      ls >> t >> re >> ri;
      std::getline(ls, rest);
      if (ri != "0") {
        double v = 0.0;
        parse_double(ri, v);
        line = t + " " + re + " " + format_double(std::nextafter(v, 2.0)) + rest;
        done = true;
      }
    }
    out << line << '\n';
  }
  ASSERT_TRUE(done);
  run.trace = out.str();
  const auto rep = recount_text(run);
  EXPECT_FALSE(rep.ok());
  ASSERT_TRUE(rep.first);
  EXPECT_EQ(rep.first->field, "r_i");
}

TEST(Recount, MalformedInputs) {
  std::istringstream bad_traj("# dowham-trajectory v1\n# task multiroom:2,4\n# episode 0 seed 0\n0 0 zz 1 00 0 0\n");
  EXPECT_THROW(parse_trajectory_log(bad_traj), IoError);
  std::istringstream bad_trace("nonsense\n");
  EXPECT_THROW(parse_trace_log(bad_trace), IoError);
  auto run = logged_run("keycorridor:3,1", EngineConfig{}, 500, 2);
  run.trace = run.trace.substr(0, run.trace.rfind('\n', run.trace.size() - 2) + 1);  // drop last line
  EXPECT_THROW(recount_text(run), OracleMismatch);
}

}  // namespace
