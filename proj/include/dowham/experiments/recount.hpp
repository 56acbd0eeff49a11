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

// Independent re-derivation of intrinsic rewards from run logs. Deliberately
// shares no reward code with the engines: counters are plain std::map tables
// and the RND networks are nested vectors with explicit loops.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dowham/agent/trainer.hpp"
#include "dowham/errors.hpp"
#include "dowham/gridworld/generators.hpp"
#include "dowham/gridworld/task.hpp"
#include "dowham/gridworld/world.hpp"
#include "dowham/hash.hpp"
#include "dowham/intrinsic/reward_engine.hpp"
#include "dowham/rng.hpp"

namespace dowham::experiments {

struct LoggedTransition {
  std::uint64_t episode = 0;
  int t = 0;
  std::uint64_t before = 0;
  int action = 0;
  std::uint64_t after = 0;
  double extrinsic = 0.0;
  bool done = false;
  int line = 0;
};

struct LoggedEpisode {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::vector<LoggedTransition> steps;
};

struct TrajectoryLog {
  gridworld::TaskSpec task;
  std::vector<LoggedEpisode> episodes;

  std::size_t transitions() const {
    std::size_t n = 0;
    for (const auto& e : episodes) n += e.steps.size();
    return n;
  }
};

struct TracedStep {
  std::uint64_t t = 0;
  double extrinsic = 0.0;
  double intrinsic = 0.0;
  double bonus = 0.0;
  std::uint64_t visits = 0;
  int line = 0;
};

struct TraceLog {
  intrinsic::EngineConfig engine;
  std::vector<TracedStep> steps;
};

namespace detail {

inline std::vector<std::string> words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

[[noreturn]] inline void bad_line(const char* what, int line, const std::string& why) {
  throw IoError(std::string(what) + " line " + std::to_string(line) + ": " + why);
}

template <class T>
T num(const std::string& s, const char* what, int line) {
  T v{};
  if constexpr (std::is_floating_point_v<T>) {
    if (!parse_double(s, v)) bad_line(what, line, "bad number '" + s + "'");
  } else {
    if (!parse_int(s, v)) bad_line(what, line, "bad integer '" + s + "'");
  }
  return v;
}

inline std::uint64_t hex(const std::string& s, const char* what, int line) {
  std::uint64_t v = 0;
  if (!parse_hex(s, v)) bad_line(what, line, "bad hash '" + s + "'");
  return v;
}

}  // namespace detail

inline TrajectoryLog parse_trajectory_log(std::istream& is) {
  constexpr const char* kWhat = "trajectory log";
  TrajectoryLog log;
  std::string line;
  int n = 0;
  bool have_task = false;
  if (!std::getline(is, line) || line != "# dowham-trajectory v1") throw IoError("trajectory log: missing header");
  ++n;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    const auto w = detail::words(line);
    if (w[0] == "#") {
      if (w.size() == 3 && w[1] == "task") {
        try {
          log.task = gridworld::parse_task(w[2]);
        } catch (const Error& e) {
          detail::bad_line(kWhat, n, e.what());
        }
        have_task = true;
      } else if (w.size() == 5 && w[1] == "episode" && w[3] == "seed") {
        log.episodes.push_back({detail::num<std::uint64_t>(w[2], kWhat, n), detail::hex(w[4], kWhat, n), {}});
      } else {
        detail::bad_line(kWhat, n, "unknown header");
      }
      continue;
    }
    if (w.size() != 7) detail::bad_line(kWhat, n, "expected 7 fields");
    if (log.episodes.empty()) detail::bad_line(kWhat, n, "transition before any episode header");
    LoggedTransition r;
    r.episode = detail::num<std::uint64_t>(w[0], kWhat, n);
    r.t = detail::num<int>(w[1], kWhat, n);
    r.before = detail::hex(w[2], kWhat, n);
    r.action = detail::num<int>(w[3], kWhat, n);
    r.after = detail::hex(w[4], kWhat, n);
    r.extrinsic = detail::num<double>(w[5], kWhat, n);
    r.done = detail::num<int>(w[6], kWhat, n) != 0;
    r.line = n;
    if (r.action < 0 || r.action >= static_cast<int>(gridworld::kNumActions)) detail::bad_line(kWhat, n, "bad action");
    if (r.episode != log.episodes.back().index) detail::bad_line(kWhat, n, "episode id does not match header");
    log.episodes.back().steps.push_back(r);
  }
  if (!have_task) throw IoError("trajectory log: missing task line");
  return log;
}

inline TraceLog parse_trace_log(std::istream& is) {
  constexpr const char* kWhat = "reward trace";
  TraceLog trace;
  std::string line;
  int n = 0;
  bool have_engine = false;
  if (!std::getline(is, line) || line != "# dowham-trace v1") throw IoError("reward trace: missing header");
  ++n;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    const auto w = detail::words(line);
    if (w[0] == "#") {
      if (w.size() == 11 && w[1] == "engine" && w[3] == "eta" && w[5] == "beta" && w[7] == "effect" && w[9] == "seed") {
        try {
          trace.engine.kind = intrinsic::parse_engine_kind(w[2]);
          trace.engine.effect = intrinsic::parse_effect_mode(w[8]);
        } catch (const Error& e) {
          detail::bad_line(kWhat, n, e.what());
        }
        trace.engine.eta = detail::num<double>(w[4], kWhat, n);
        trace.engine.beta = detail::num<double>(w[6], kWhat, n);
        trace.engine.seed = detail::hex(w[10], kWhat, n);
        have_engine = true;
      } else if (w.size() == 12 && w[1] == "rnd" && w[2] == "hidden" && w[4] == "output" && w[6] == "lr" &&
                 w[8] == "clip" && w[10] == "epsilon") {
        trace.engine.rnd.hidden = detail::num<int>(w[3], kWhat, n);
        trace.engine.rnd.output = detail::num<int>(w[5], kWhat, n);
        trace.engine.rnd.learning_rate = detail::num<double>(w[7], kWhat, n);
        trace.engine.rnd.reward_clip = detail::num<double>(w[9], kWhat, n);
        trace.engine.rnd.epsilon = detail::num<double>(w[11], kWhat, n);
      } else {
        detail::bad_line(kWhat, n, "unknown header");
      }
      continue;
    }
    if (w.size() != 5) detail::bad_line(kWhat, n, "expected 5 fields");
    trace.steps.push_back({detail::num<std::uint64_t>(w[0], kWhat, n), detail::num<double>(w[1], kWhat, n),
                           detail::num<double>(w[2], kWhat, n), detail::num<double>(w[3], kWhat, n),
                           detail::num<std::uint64_t>(w[4], kWhat, n), n});
  }
  if (!have_engine) throw IoError("reward trace: missing engine line");
  return trace;
}

/// Plain-loop random network distillation mirroring the engine's definition.
class NaiveRnd {
 public:
  NaiveRnd(std::uint64_t seed, const intrinsic::RndConfig& cfg) : cfg_(cfg) {
    Rng t(derive_seed(seed, 1));
    Rng p(derive_seed(seed, 2));
    init(target_, t);
    init(pred_, p);
  }

  double reward(const gridworld::Observation& obs) {
    const std::vector<double> x = features(obs);
    const std::vector<double> target = forward(target_, x, nullptr);
    std::vector<double> pre;
    const std::vector<double> out = forward(pred_, x, &pre);
    const auto k = static_cast<std::size_t>(cfg_.output);
    double err = 0.0;
    std::vector<double> diff(k);
    for (std::size_t i = 0; i < k; ++i) {
      diff[i] = out[i] - target[i];
      err += diff[i] * diff[i];
    }
    err /= static_cast<double>(k);

    // Welford running moments over every error seen so far.
    ++n_;
    const double delta = err - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (err - mean_);
    const double sd = n_ > 1 ? std::sqrt(m2_ / static_cast<double>(n_)) : 0.0;
    double r = err / std::max(sd, cfg_.epsilon);
    r = std::min(std::max(r, 0.0), cfg_.reward_clip);

    // Backprop through the predictor; all gradients use pre-update weights.
    const auto h = static_cast<std::size_t>(cfg_.hidden);
    std::vector<double> d_out(k);
    for (std::size_t i = 0; i < k; ++i) d_out[i] = 2.0 / static_cast<double>(k) * diff[i];
    std::vector<double> d_pre(h, 0.0);
    for (std::size_t j = 0; j < h; ++j) {
      if (!(pre[j] > 0.0)) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += pred_.w2[i][j] * d_out[i];
      d_pre[j] = s;
    }
    const double lr = cfg_.learning_rate;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < h; ++j) pred_.w2[i][j] -= lr * d_out[i] * std::max(pre[j], 0.0);
      pred_.b2[i] -= lr * d_out[i];
    }
    for (std::size_t j = 0; j < h; ++j) {
      for (std::size_t c = 0; c < x.size(); ++c) pred_.w1[j][c] -= lr * d_pre[j] * x[c];
      pred_.b1[j] -= lr * d_pre[j];
    }
    return r;
  }

 private:
  struct Net {
    std::vector<std::vector<double>> w1, w2;
    std::vector<double> b1, b2;
  };

  static std::vector<double> features(const gridworld::Observation& obs) {
    std::vector<double> x;
    for (const auto& v : obs.view) {
      x.push_back(static_cast<int>(v.kind) / 7.0);
      x.push_back(static_cast<int>(v.color) / 6.0);
      x.push_back(static_cast<int>(v.door_state) / 3.0);
    }
    x.push_back(obs.carried ? static_cast<int>(obs.carried->kind) / 7.0 : 0.0);
    x.push_back(obs.carried ? static_cast<int>(obs.carried->color) / 6.0 : 0.0);
    return x;
  }

  void init(Net& net, Rng& rng) const {
    const std::size_t in = 3 * gridworld::Observation::kSize * gridworld::Observation::kSize + 2;
    const auto h = static_cast<std::size_t>(cfg_.hidden);
    const auto k = static_cast<std::size_t>(cfg_.output);
    net.w1.assign(h, std::vector<double>(in));
    net.w2.assign(k, std::vector<double>(h));
    net.b1.assign(h, 0.0);
    net.b2.assign(k, 0.0);
    // Column-major fill order, one normal draw per weight.
    for (std::size_t c = 0; c < in; ++c) {
      for (std::size_t r = 0; r < h; ++r) net.w1[r][c] = rng.normal() / std::sqrt(static_cast<double>(in));
    }
    for (std::size_t c = 0; c < h; ++c) {
      for (std::size_t r = 0; r < k; ++r) net.w2[r][c] = rng.normal() / std::sqrt(static_cast<double>(h));
    }
  }

  static std::vector<double> forward(const Net& net, const std::vector<double>& x, std::vector<double>* pre_out) {
    std::vector<double> pre(net.w1.size());
    for (std::size_t r = 0; r < net.w1.size(); ++r) {
      double s = net.b1[r];
      for (std::size_t c = 0; c < x.size(); ++c) s += net.w1[r][c] * x[c];
      pre[r] = s;
    }
    std::vector<double> out(net.w2.size());
    for (std::size_t r = 0; r < net.w2.size(); ++r) {
      double s = net.b2[r];
      for (std::size_t c = 0; c < pre.size(); ++c) s += net.w2[r][c] * std::max(pre[c], 0.0);
      out[r] = s;
    }
    if (pre_out) *pre_out = std::move(pre);
    return out;
  }

  intrinsic::RndConfig cfg_;
  Net target_, pred_;
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

enum class RecountMode : std::uint8_t { log, replay };

struct Divergence {
  std::uint64_t step = 0;  // global transition index
  int trace_line = 0;
  std::string field;
  double expected = 0.0;  // from the trace
  double recomputed = 0.0;
};

struct RecountReport {
  RecountMode mode = RecountMode::log;
  std::uint64_t transitions = 0;
  std::uint64_t mismatches = 0;
  double max_abs_diff = 0.0;
  std::optional<Divergence> first;

  bool ok() const { return mismatches == 0; }
};

/// Log mode suffices when rewards depend only on logged state hashes.
inline RecountMode natural_mode(const intrinsic::EngineConfig& e) {
  if (e.kind == intrinsic::EngineKind::rnd) return RecountMode::replay;
  if (e.kind == intrinsic::EngineKind::dowham && e.effect == intrinsic::EffectMode::observation) return RecountMode::replay;
  return RecountMode::log;
}

/// Recomputes every r_i (and bonus / visit count) and compares with the
/// trace: bit-exact in log mode, within `tolerance` in replay mode. Replay
/// regenerates each episode from the task and its seed and also checks the
/// logged state hashes against the simulator.
inline RecountReport recount(const TrajectoryLog& log, const TraceLog& trace, bool force_replay = false,
                             double tolerance = 1e-6) {
  const auto& eng = trace.engine;
  RecountReport rep;
  rep.mode = force_replay ? RecountMode::replay : natural_mode(eng);
  if (log.transitions() != trace.steps.size()) {
    throw OracleMismatch("trajectory has " + std::to_string(log.transitions()) + " transitions but the trace has " +
                         std::to_string(trace.steps.size()));
  }
  const bool exact = rep.mode == RecountMode::log;

  std::map<int, std::uint64_t> uses, effective;
  std::map<std::pair<std::uint64_t, int>, std::uint64_t> state_action;
  std::optional<NaiveRnd> rnd;
  if (eng.kind == intrinsic::EngineKind::rnd) {
    if (rep.mode != RecountMode::replay) throw ContractViolation("recount: rnd needs replay mode");
    rnd.emplace(eng.seed, eng.rnd);
  }

  auto compare = [&](std::uint64_t step, const TracedStep& ts, const char* field, double want, double got) {
    const double d = std::fabs(want - got);
    rep.max_abs_diff = std::max(rep.max_abs_diff, d);
    const bool bad = exact ? !(want == got) : !(d <= tolerance);
    if (!bad) return;
    ++rep.mismatches;
    if (!rep.first) rep.first = Divergence{step, ts.line, field, want, got};
  };

  std::uint64_t step = 0;
  for (const auto& ep : log.episodes) {
    std::map<std::uint64_t, std::uint64_t> visits;  // episodic
    std::optional<gridworld::GridWorld> world;
    gridworld::Observation obs;
    if (rep.mode == RecountMode::replay) {
      // Runs seed the engine and the trainer identically, so the engine seed fixes any shared topology.
      world = agent::run_factory(log.task, eng.seed)(ep.seed);
      obs = gridworld::observe(*world);
    }
    for (std::size_t i = 0; i < ep.steps.size(); ++i) {
      const auto& tr = ep.steps[i];
      const auto& ts = trace.steps[step];
      std::uint64_t key_before = tr.before;
      std::uint64_t key_after = tr.after;
      gridworld::Observation next_obs;
      if (world) {
        if (gridworld::canonical_hash(*world).value != tr.before) {
          throw OracleMismatch("replay diverged from the log at step " + std::to_string(step) + " (log line " +
                               std::to_string(tr.line) + "): state before does not match");
        }
        const std::uint64_t ob = gridworld::observation_hash(obs);
        auto res = gridworld::step(*world, static_cast<gridworld::Action>(tr.action));
        if (gridworld::canonical_hash(*world).value != tr.after) {
          throw OracleMismatch("replay diverged from the log at step " + std::to_string(step) + " (log line " +
                               std::to_string(tr.line) + "): state after does not match");
        }
        next_obs = res.observation;
        if (eng.effect == intrinsic::EffectMode::observation) {
          key_before = ob;
          key_after = gridworld::observation_hash(next_obs);
        }
        compare(step, ts, "extrinsic", ts.extrinsic, res.reward);
      }
      if (i == 0 && eng.kind == intrinsic::EngineKind::dowham) ++visits[key_before];

      double r_i = 0.0;
      double bonus = 0.0;
      double n = 0.0;
      switch (eng.kind) {
        case intrinsic::EngineKind::none: break;
        case intrinsic::EngineKind::dowham: {
          const bool changed = key_before != key_after;
          const std::uint64_t u = ++uses[tr.action];
          const std::uint64_t e = changed ? ++effective[tr.action] : effective[tr.action];
          const std::uint64_t nv = ++visits[key_after];
          bonus = (std::pow(eng.eta, 1.0 - static_cast<double>(e) / static_cast<double>(u)) - 1.0) / (eng.eta - 1.0);
          if (changed) r_i = bonus / std::sqrt(static_cast<double>(nv));
          n = static_cast<double>(nv);
          break;
        }
        case intrinsic::EngineKind::count: {
          const std::uint64_t c = ++state_action[{tr.before, tr.action}];
          r_i = 1.0 / std::sqrt(static_cast<double>(c));
          bonus = r_i;
          n = static_cast<double>(c);
          break;
        }
        case intrinsic::EngineKind::rnd: {
          r_i = rnd->reward(next_obs);
          bonus = r_i;
          break;
        }
      }
      compare(step, ts, "r_i", ts.intrinsic, r_i);
      compare(step, ts, "bonus", ts.bonus, bonus);
      if (eng.kind == intrinsic::EngineKind::rnd) {
        compare(step, ts, "visits", static_cast<double>(ts.visits), 0.0);
      } else {
        compare(step, ts, "visits", static_cast<double>(ts.visits), n);
      }
      compare(step, ts, "extrinsic_log", ts.extrinsic, tr.extrinsic);
      if (world) obs = std::move(next_obs);
      ++step;
    }
  }
  rep.transitions = step;
  return rep;
}

}  // namespace dowham::experiments
