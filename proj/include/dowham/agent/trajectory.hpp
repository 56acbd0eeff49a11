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
#include <ostream>
#include <string>
#include <vector>

#include "dowham/gridworld/task.hpp"
#include "dowham/gridworld/types.hpp"
#include "dowham/gridworld/world.hpp"
#include "dowham/hash.hpp"
#include "dowham/intrinsic/reward_engine.hpp"

namespace dowham::agent {

/// One recorded transition.
struct TransitionRecord {
  std::uint64_t episode = 0;
  int t = 0;
  gridworld::StateHash before;
  gridworld::Action action = gridworld::Action::done;
  gridworld::StateHash after;
  double extrinsic = 0.0;
  double intrinsic = 0.0;
  bool done = false;
};

using Trajectory = std::vector<TransitionRecord>;

// Trajectory log: one line per transition,
//   <episode> <t> <state_hash_before> <action_id> <state_hash_after> <extrinsic_reward> <done>
// preceded by '#' header lines (format tag, task) and one '# episode <n> seed <hex>' line per episode.
class TrajectoryLogWriter {
 public:
  TrajectoryLogWriter(std::ostream& os, const gridworld::TaskSpec& task) : os_(os) {
    os_ << "# dowham-trajectory v1\n# task " << gridworld::to_string(task) << "\n";
  }
  void begin_episode(std::uint64_t episode, std::uint64_t seed) {
    os_ << "# episode " << episode << " seed " << to_hex(seed) << "\n";
  }
  void write(const TransitionRecord& r) {
    os_ << r.episode << ' ' << r.t << ' ' << to_hex(r.before.value) << ' ' << static_cast<int>(r.action) << ' '
        << to_hex(r.after.value) << ' ' << format_double(r.extrinsic) << ' ' << (r.done ? 1 : 0) << '\n';
  }

 private:
  std::ostream& os_;
};

// Reward trace: one line per transition, `<t> <r_e> <r_i> <bonus> <visits>`,
// after a header naming the engine configuration.
class RewardTraceWriter {
 public:
  RewardTraceWriter(std::ostream& os, const intrinsic::EngineConfig& cfg) : os_(os) {
    os_ << "# dowham-trace v1\n# engine " << intrinsic::to_string(cfg.kind) << " eta " << format_double(cfg.eta)
        << " beta " << format_double(cfg.beta) << " effect " << intrinsic::to_string(cfg.effect) << " seed "
        << to_hex(cfg.seed) << "\n# rnd hidden " << cfg.rnd.hidden << " output " << cfg.rnd.output << " lr "
        << format_double(cfg.rnd.learning_rate) << " clip " << format_double(cfg.rnd.reward_clip) << " epsilon "
        << format_double(cfg.rnd.epsilon) << "\n";
  }
  void write(std::uint64_t t, double r_e, const intrinsic::IntrinsicSample& s) {
    os_ << t << ' ' << format_double(r_e) << ' ' << format_double(s.reward) << ' ' << format_double(s.bonus) << ' '
        << s.visits << '\n';
  }

 private:
  std::ostream& os_;
};

}  // namespace dowham::agent
