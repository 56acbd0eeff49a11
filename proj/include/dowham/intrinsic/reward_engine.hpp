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
#include <optional>
#include <string>
#include <string_view>

#include "dowham/errors.hpp"
#include "dowham/gridworld/world.hpp"
#include "dowham/intrinsic/action_stats.hpp"
#include "dowham/intrinsic/count.hpp"
#include "dowham/intrinsic/dowham.hpp"
#include "dowham/intrinsic/episodic_counter.hpp"
#include "dowham/intrinsic/rnd.hpp"

namespace dowham::intrinsic {

enum class EngineKind : std::uint8_t { none, dowham, count, rnd };

inline std::string_view to_string(EngineKind k) {
  switch (k) {
    case EngineKind::none: return "none";
    case EngineKind::dowham: return "dowham";
    case EngineKind::count: return "count";
    case EngineKind::rnd: return "rnd";
  }
  return "?";
}

inline EngineKind parse_engine_kind(std::string_view s) {
  for (auto k : {EngineKind::none, EngineKind::dowham, EngineKind::count, EngineKind::rnd}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown engine '" + std::string(s) + "' (expected none|dowham|count|rnd)");
}

inline std::string_view to_string(EffectMode m) { return m == EffectMode::full_state ? "state" : "observation"; }

inline EffectMode parse_effect_mode(std::string_view s) {
  if (s == "state") return EffectMode::full_state;
  if (s == "observation") return EffectMode::observation;
  throw ConfigError("unknown effect mode '" + std::string(s) + "' (expected state|observation)");
}

struct EngineConfig {
  EngineKind kind = EngineKind::dowham;
  double eta = 40.0;
  double beta = 0.05;
  EffectMode effect = EffectMode::full_state;
  RndConfig rnd;
  std::uint64_t seed = 0;

  void validate() const {
    if (kind == EngineKind::dowham) check_eta(eta);
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be a finite value >= 0");
  }
};

/// r = r_e + beta * r_i.
inline double combined_reward(double r_e, double r_i, double beta) {
  if (!(beta >= 0.0)) throw ContractViolation("combined_reward: beta must be >= 0");
  return r_e + beta * r_i;
}

/// Everything an engine may look at for one transition.
struct Transition {
  gridworld::StateHash state_before;
  gridworld::StateHash state_after;
  std::uint64_t obs_before = 0;  // observation hashes, used in observation effect mode
  std::uint64_t obs_after = 0;
  gridworld::Action action = gridworld::Action::done;
  const gridworld::Observation* observation_after = nullptr;
};

/// Per-transition output. `bonus` is B(a) for DoWhaM and the raw bonus for
/// the baselines; `visits` is N(s') for DoWhaM and n(s, a) for COUNT.
struct IntrinsicSample {
  double reward = 0.0;
  double bonus = 0.0;
  std::uint64_t visits = 0;
};

/// Single-owner reward engine; one instance per training run.
class RewardEngine {
 public:
  explicit RewardEngine(EngineConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    if (cfg_.kind == EngineKind::rnd) rnd_.emplace(cfg_.seed, cfg_.rnd);
  }

  const EngineConfig& config() const { return cfg_; }
  EngineKind kind() const { return cfg_.kind; }
  double beta() const { return cfg_.beta; }

  /// Clears the episodic counter and records the initial state as visited.
  void begin_episode(gridworld::StateHash s0, std::uint64_t obs0) {
    episodic_.reset();
    if (cfg_.kind == EngineKind::dowham) episodic_.visit(effect_key(s0, obs0));
  }

  IntrinsicSample intrinsic(const Transition& t) {
    IntrinsicSample out;
    switch (cfg_.kind) {
      case EngineKind::none: break;
      case EngineKind::dowham: {
        const DowhamConfig dcfg{cfg_.eta, cfg_.beta, cfg_.effect};
        const auto s = dowham_reward(stats_, episodic_, effect_key(t.state_before, t.obs_before), t.action,
                                     effect_key(t.state_after, t.obs_after), dcfg);
        out = {s.reward, s.bonus, s.visits};
        break;
      }
      case EngineKind::count: {
        out.reward = count_reward(counts_, t.state_before, t.action);
        out.bonus = out.reward;
        out.visits = counts_.count(t.state_before, t.action);
        break;
      }
      case EngineKind::rnd: {
        if (t.observation_after == nullptr) throw ContractViolation("rnd engine needs the next observation");
        out.reward = rnd_->reward(*t.observation_after);
        out.bonus = out.reward;
        break;
      }
    }
    return out;
  }

  double combined(double r_e, double r_i) const { return combined_reward(r_e, r_i, cfg_.beta); }

  const ActionStats& action_stats() const { return stats_; }
  ActionStats& action_stats() { return stats_; }
  const StateActionCounter& state_action_counts() const { return counts_; }
  StateActionCounter& state_action_counts() { return counts_; }
  const EpisodicStateCounter& episodic() const { return episodic_; }

 private:
  gridworld::StateHash effect_key(gridworld::StateHash s, std::uint64_t obs) const {
    return cfg_.effect == EffectMode::full_state ? s : gridworld::StateHash{obs};
  }

  EngineConfig cfg_;
  ActionStats stats_;
  EpisodicStateCounter episodic_;
  StateActionCounter counts_;
  std::optional<RndState> rnd_;
};

}  // namespace dowham::intrinsic
