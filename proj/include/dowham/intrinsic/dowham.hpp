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

#include <cmath>
#include <cstdint>

#include "dowham/intrinsic/action_stats.hpp"
#include "dowham/intrinsic/episodic_counter.hpp"

namespace dowham::intrinsic {

/// Which notion of "state" decides whether an action was effective.
enum class EffectMode : std::uint8_t { full_state, observation };

struct DowhamConfig {
  double eta = 40.0;
  double beta = 0.05;
  EffectMode effect = EffectMode::full_state;

  void validate() const {
    check_eta(eta);
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be a finite value >= 0");
  }
};

struct DowhamSample {
  double reward = 0.0;
  double bonus = 0.0;         // B(a) after this transition was recorded
  std::uint32_t visits = 0;   // N(s_after) including this arrival
  bool effective = false;
};

/// One DoWhaM transition. Updates U/E and the episodic count of `after`
/// first, then pays B(a) / sqrt(N(after)) if the state changed, 0 otherwise.
inline DowhamSample dowham_reward(ActionStats& stats, EpisodicStateCounter& episodic, StateHash before, Action action,
                                  StateHash after, const DowhamConfig& cfg) {
  DowhamSample out;
  out.effective = before != after;
  stats.record(action, out.effective);
  out.visits = episodic.visit(after);
  out.bonus = bonus(stats, action, cfg.eta);
  if (out.effective) out.reward = out.bonus / std::sqrt(static_cast<double>(out.visits));
  return out;
}

}  // namespace dowham::intrinsic
