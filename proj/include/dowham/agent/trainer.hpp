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

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dowham/agent/qtable.hpp"
#include "dowham/agent/trajectory.hpp"
#include "dowham/errors.hpp"
#include "dowham/gridworld/generators.hpp"
#include "dowham/gridworld/world.hpp"
#include "dowham/intrinsic/action_stats.hpp"
#include "dowham/intrinsic/reward_engine.hpp"
#include "dowham/rng.hpp"

namespace dowham::agent {

/// What the Q-table is keyed on.
enum class StateKeyMode : std::uint8_t { full_state, observation, local_view };

inline std::string_view to_string(StateKeyMode m) {
  switch (m) {
    case StateKeyMode::full_state: return "state";
    case StateKeyMode::observation: return "observation";
    case StateKeyMode::local_view: return "local";
  }
  return "?";
}

inline StateKeyMode parse_state_key_mode(std::string_view s) {
  if (s == "state") return StateKeyMode::full_state;
  if (s == "observation") return StateKeyMode::observation;
  if (s == "local") return StateKeyMode::local_view;
  throw ConfigError("unknown state key '" + std::string(s) + "' (expected state|observation|local)");
}

struct KeySpec {
  StateKeyMode mode = StateKeyMode::local_view;
  /// Half-width of the all-around view used by local_view.
  int radius = 1;
};

struct TrainConfig {
  double gamma = 0.99;
  double alpha = 0.1;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  /// Linear decay length; 0 means 20% of the budget.
  std::uint64_t epsilon_decay_steps = 0;
  std::uint64_t budget = 100'000;
  std::uint64_t eval_every = 10'000;
  int eval_episodes = 20;
  double eval_epsilon = 0.01;
  std::uint64_t seed = 0;
  StateKeyMode state_key = StateKeyMode::local_view;
  int view_radius = 1;
  /// Withhold the extrinsic reward from the learning signal (goal events are still reported).
  bool rewardless = false;
  /// Value read for unvisited state-action pairs.
  double q_init = 0.2;

  KeySpec key() const { return {state_key, view_radius}; }

  void validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in (0, 1]");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0, 1]");
    for (double e : {epsilon_start, epsilon_end, eval_epsilon}) {
      if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("epsilon values must be in [0, 1]");
    }
    if (budget < 1) throw ConfigError("budget must be >= 1");
    if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
    if (!std::isfinite(q_init)) throw ConfigError("q_init must be finite");
    if (view_radius < 1 || view_radius > 32) throw ConfigError("view_radius must be in [1, 32]");
  }

  double epsilon_at(std::uint64_t step) const {
    const std::uint64_t decay = epsilon_decay_steps ? epsilon_decay_steps : std::max<std::uint64_t>(1, budget / 5);
    if (step >= decay) return epsilon_end;
    const double frac = static_cast<double>(step) / static_cast<double>(decay);
    return epsilon_start + (epsilon_end - epsilon_start) * frac;
  }
};

struct CurvePoint {
  std::uint64_t step = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
  std::uint64_t seed = 0;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct EvalResult {
  double success_rate = 0.0;
  double mean_return = 0.0;
  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

using EnvFactory = std::function<gridworld::GridWorld(std::uint64_t)>;

inline EnvFactory task_factory(gridworld::TaskSpec task) {
  return [task](std::uint64_t seed) { return gridworld::make_world(task, seed); };
}

/// Like task_factory, but fixed-layout families keep the topology drawn from
/// `run_seed` and only redraw per-episode randomness.
inline EnvFactory run_factory(gridworld::TaskSpec task, std::uint64_t run_seed) {
  if (task.family != gridworld::Family::colormaze) return task_factory(task);
  return [run_seed](std::uint64_t seed) { return gridworld::detail::build_colormaze(run_seed, seed); };
}

/// Q-table key for the current world; `s` and `obs_hash` are the precomputed state and observation digests.
inline std::uint64_t state_key(const KeySpec& spec, const gridworld::GridWorld& w, gridworld::StateHash s,
                               std::uint64_t obs_hash) {
  switch (spec.mode) {
    case StateKeyMode::full_state: return s.value;
    case StateKeyMode::observation: return obs_hash;
    case StateKeyMode::local_view: return gridworld::local_view_hash(w, spec.radius);
  }
  return 0;
}

/// Near-greedy rollouts on `episodes` fresh instances; returns extrinsic-only statistics.
inline EvalResult evaluate(const QTable& q, const EnvFactory& factory, int episodes, std::uint64_t seed,
                           KeySpec key = {}, double epsilon = 0.01) {
  if (episodes < 1) throw ContractViolation("evaluate: episodes must be >= 1");
  const StateKeyMode mode = key.mode;
  Rng rng(derive_seed(seed, 0xA5));
  int successes = 0;
  double total = 0.0;
  for (int i = 0; i < episodes; ++i) {
    gridworld::GridWorld w = factory(derive_seed(seed, static_cast<std::uint64_t>(i)));
    gridworld::Observation obs = gridworld::observe(w);
    bool done = w.terminated();
    while (!done) {
      const auto k = state_key(key, w, mode == StateKeyMode::full_state ? gridworld::canonical_hash(w) : gridworld::StateHash{},
                                 mode == StateKeyMode::observation ? gridworld::observation_hash(obs) : 0);
      const Action a = select_action(q, k, epsilon, rng);
      auto r = gridworld::step(w, a);
      total += r.reward;
      done = r.done;
      obs = std::move(r.observation);
    }
    if (w.goal_reached) ++successes;
  }
  return {static_cast<double>(successes) / episodes, total / episodes};
}

/// Per-transition data handed to training hooks.
struct StepEvent {
  std::uint64_t step = 0;  // global, 0-based
  std::uint64_t episode = 0;
  int t = 0;               // within the episode
  gridworld::Vec2 position;  // agent cell before the action
  gridworld::StateHash before;
  gridworld::StateHash after;
  Action action = Action::done;
  double extrinsic = 0.0;
  intrinsic::IntrinsicSample intrinsic;
  bool done = false;
  bool goal = false;
};

struct TrainHooks {
  std::function<void(std::uint64_t episode, std::uint64_t seed, const gridworld::GridWorld&)> on_episode_start;
  std::function<void(const StepEvent&)> on_step;
};

struct TrainResult {
  QTable q;
  std::vector<CurvePoint> curve;
  intrinsic::ActionStats action_stats;  // full-state effectiveness, tracked for every engine
  std::uint64_t episodes_started = 0;
  std::uint64_t episodes_completed = 0;
  std::uint64_t goal_events = 0;
};

inline std::uint64_t training_episode_seed(std::uint64_t run_seed, std::uint64_t episode) {
  return derive_seed(derive_seed(run_seed, 1), episode);
}
inline std::uint64_t evaluation_seed(std::uint64_t run_seed) { return derive_seed(run_seed, 2); }

/// Tabular Q-learning on r_e + beta * r_i with a fresh instance per episode.
/// Every `eval_every` steps the current table is evaluated on a fixed set of
/// held-out instances.
inline TrainResult train(const EnvFactory& factory, intrinsic::RewardEngine& engine, const TrainConfig& cfg,
                         const TrainHooks& hooks = {}) {
  cfg.validate();
  TrainResult out;
  out.q = QTable(cfg.q_init);
  Rng rng(derive_seed(cfg.seed, 3));
  const QUpdateParams params{cfg.alpha, cfg.gamma};
  const std::uint64_t eval_seed = evaluation_seed(cfg.seed);
  std::uint64_t step = 0;

  while (step < cfg.budget) {
    const std::uint64_t episode = out.episodes_started++;
    const std::uint64_t episode_seed = training_episode_seed(cfg.seed, episode);
    gridworld::GridWorld w = factory(episode_seed);
    gridworld::Observation obs = gridworld::observe(w);
    gridworld::StateHash s = gridworld::canonical_hash(w);
    std::uint64_t o = gridworld::observation_hash(obs);
    engine.begin_episode(s, o);
    std::uint64_t next_key = state_key(cfg.key(), w, s, o);
    if (hooks.on_episode_start) hooks.on_episode_start(episode, episode_seed, w);

    bool done = false;
    int t = 0;
    while (!done && step < cfg.budget) {
      const std::uint64_t key = next_key;
      const Action a = select_action(out.q, key, cfg.epsilon_at(step), rng);
      const gridworld::Vec2 position = w.agent.pos();
      auto result = gridworld::step(w, a);
      const gridworld::StateHash s2 = gridworld::canonical_hash(w);
      const std::uint64_t o2 = gridworld::observation_hash(result.observation);
      out.action_stats.record(a, s != s2);

      const intrinsic::IntrinsicSample sample = engine.intrinsic({s, s2, o, o2, a, &result.observation});
      const double learned_extrinsic = cfg.rewardless ? 0.0 : result.reward;
      const double reward = engine.combined(learned_extrinsic, sample.reward);
      next_key = state_key(cfg.key(), w, s2, o2);
      q_update(out.q, key, a, reward, next_key, w.goal_reached, params);

      done = result.done;
      if (w.goal_reached) ++out.goal_events;
      if (hooks.on_step) {
        hooks.on_step(StepEvent{step, episode, t, position, s, s2, a, result.reward, sample, done, w.goal_reached});
      }
      ++step;
      ++t;
      s = s2;
      o = o2;
      if (cfg.eval_every > 0 && step % cfg.eval_every == 0) {
        const auto e = evaluate(out.q, factory, cfg.eval_episodes, eval_seed, cfg.key(), cfg.eval_epsilon);
        out.curve.push_back({step, e.success_rate, e.mean_return, cfg.seed});
      }
    }
    if (done) ++out.episodes_completed;
  }
  return out;
}

/// First evaluation step whose success rate reaches `threshold`.
inline std::optional<std::uint64_t> steps_to_success(const std::vector<CurvePoint>& curve, double threshold) {
  for (const auto& p : curve) {
    if (p.success_rate >= threshold) return p.step;
  }
  return std::nullopt;
}

}  // namespace dowham::agent
