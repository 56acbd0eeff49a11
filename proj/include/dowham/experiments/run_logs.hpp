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

#include "dowham/agent/trainer.hpp"
#include "dowham/agent/trajectory.hpp"

namespace dowham::experiments {

/// Hooks that stream a run's trajectory log and reward trace.
inline agent::TrainHooks logging_hooks(agent::TrajectoryLogWriter& trajectory, agent::RewardTraceWriter& trace) {
  agent::TrainHooks h;
  h.on_episode_start = [&trajectory](std::uint64_t episode, std::uint64_t seed, const gridworld::GridWorld&) {
    trajectory.begin_episode(episode, seed);
  };
  h.on_step = [&trajectory, &trace](const agent::StepEvent& e) {
    trajectory.write({e.episode, e.t, e.before, e.action, e.after, e.extrinsic, e.intrinsic.reward, e.done});
    trace.write(e.step, e.extrinsic, e.intrinsic);
  };
  return h;
}

}  // namespace dowham::experiments
