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
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dowham/agent/trainer.hpp"
#include "dowham/errors.hpp"
#include "dowham/experiments/output.hpp"
#include "dowham/gridworld/task.hpp"
#include "dowham/hash.hpp"
#include "dowham/intrinsic/reward_engine.hpp"

namespace dowham::cli {

// Config files are flat `key = value` lines grouped under [section]
// headers named after the library modules. '#' starts a comment.
//
//   [gridworld]
//   task = keycorridor:3,2
//   [intrinsic]
//   engine = dowham
//   eta = 40
//
// Every key may also be given as a command-line flag; flags win.

struct KeyInfo {
  std::string_view section;
  std::string_view key;
  std::string_view help;
};

inline constexpr std::array<KeyInfo, 26> kKeys{{
    {"gridworld", "task", "task spec, e.g. multiroom:2,4 | keycorridor:3,2 | obstructed:2,lhb | playground | ballpit:max | colormaze"},
    {"gridworld", "tasks", "semicolon-separated task list (benchmark)"},
    {"intrinsic", "engine", "reward engine(s): none|dowham|count|rnd, comma-separated for studies"},
    {"intrinsic", "eta", "DoWhaM decay base, > 1"},
    {"intrinsic", "beta", "intrinsic reward scale, >= 0"},
    {"intrinsic", "effect", "what counts as an effective action: state|observation"},
    {"intrinsic", "rnd_hidden", "RND hidden width"},
    {"intrinsic", "rnd_output", "RND embedding size"},
    {"intrinsic", "rnd_lr", "RND predictor learning rate"},
    {"agent", "gamma", "discount"},
    {"agent", "alpha", "Q-learning step size"},
    {"agent", "epsilon_start", "initial exploration rate"},
    {"agent", "epsilon_end", "final exploration rate"},
    {"agent", "epsilon_decay_steps", "linear decay length (0 = 20% of budget)"},
    {"agent", "budget", "environment steps per run"},
    {"agent", "eval_every", "steps between evaluations (0 disables)"},
    {"agent", "eval_episodes", "held-out instances per evaluation"},
    {"agent", "eval_epsilon", "exploration rate during evaluation"},
    {"agent", "state_key", "Q-table key: local|observation|state"},
    {"agent", "view_radius", "half-width of the local view key"},
    {"agent", "q_init", "initial Q-value"},
    {"experiments", "seeds", "seed list: 1,2,3 or range 1-5"},
    {"experiments", "levels", "BallPit levels, comma-separated"},
    {"experiments", "workers", "worker threads (0 = hardware concurrency)"},
    {"cli", "output", "output root (default: $DOWHAM_OUTPUT_ROOT or ./runs)"},
    {"cli", "overwrite", "replace existing run directories: true|false"},
}};

inline const KeyInfo* find_key(std::string_view section, std::string_view key) {
  for (const auto& k : kKeys) {
    if (k.section == section && k.key == key) return &k;
  }
  return nullptr;
}

inline const KeyInfo* find_key(std::string_view key) {
  for (const auto& k : kKeys) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

struct ConfigValue {
  std::string value;
  std::string origin;  // "file:line" or "--flag"
};

/// `section.key` -> value.
using ConfigMap = std::map<std::string, ConfigValue>;

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Strict parse: unknown sections / keys, duplicates and malformed lines are
/// ConfigErrors carrying `<name>:<line>`.
inline ConfigMap parse_config(std::istream& is, const std::string& name = "config") {
  ConfigMap out;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string where = name + ":" + std::to_string(line);
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + ": malformed section header");
      section = std::string(trim(s.substr(1, s.size() - 2)));
      const bool known = std::any_of(kKeys.begin(), kKeys.end(), [&](const KeyInfo& k) { return k.section == section; });
      if (!known) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside any [section]");
    if (!find_key(section, key)) throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    const std::string full = section + "." + key;
    if (out.count(full)) throw ConfigError(where + ": duplicate key '" + key + "'");
    out[full] = {value, where};
  }
  return out;
}

inline ConfigMap load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  return parse_config(in, path.string());
}

/// Applies a command-line value; flags override file entries.
inline void set_flag(ConfigMap& m, std::string_view key, const std::string& value) {
  const KeyInfo* k = find_key(key);
  if (!k) throw ConfigError("unknown option --" + std::string(key));
  m[std::string(k->section) + "." + std::string(key)] = {value, "--" + std::string(key)};
}

/// Fully resolved settings for one command.
struct RunConfig {
  std::vector<gridworld::TaskSpec> tasks{gridworld::TaskSpec::multiroom(2, 4)};
  std::vector<intrinsic::EngineConfig> engines{intrinsic::EngineConfig{}};
  agent::TrainConfig train;
  std::vector<std::uint64_t> seeds{1};
  std::vector<gridworld::BallPitLevel> levels{gridworld::BallPitLevel::no_ball, gridworld::BallPitLevel::small,
                                              gridworld::BallPitLevel::more, gridworld::BallPitLevel::max};
  unsigned workers = 0;
  std::filesystem::path output = "runs";
  experiments::OutputPolicy policy = experiments::OutputPolicy::fail_if_exists;

  const gridworld::TaskSpec& task() const { return tasks.front(); }
  const intrinsic::EngineConfig& engine() const { return engines.front(); }
};

namespace detail {

inline std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  for (const auto part : gridworld::detail::split(s, sep)) {
    const auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

inline double to_double(const ConfigValue& v, std::string_view key) {
  double d = 0.0;
  if (!parse_double(v.value, d)) {
    throw ConfigError(v.origin + ": '" + std::string(key) + "' expects a number, got '" + v.value + "'");
  }
  return d;
}

inline std::uint64_t to_u64(const ConfigValue& v, std::string_view key) {
  std::uint64_t n = 0;
  double d = 0.0;
  if (parse_int(v.value, n)) return n;
  // Accept exact scientific forms such as 1e6.
  if (parse_double(v.value, d) && d >= 0.0 && d <= 9.0e18 && d == static_cast<double>(static_cast<std::uint64_t>(d))) {
    return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(v.origin + ": '" + std::string(key) + "' expects a non-negative integer, got '" + v.value + "'");
}

inline bool to_bool(const ConfigValue& v, std::string_view key) {
  if (v.value == "true" || v.value == "1" || v.value == "yes") return true;
  if (v.value == "false" || v.value == "0" || v.value == "no") return false;
  throw ConfigError(v.origin + ": '" + std::string(key) + "' expects true|false, got '" + v.value + "'");
}

/// "1,2,3", "1-5" or a mix ("1-3,7").
inline std::vector<std::uint64_t> parse_seeds(const ConfigValue& v) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split_list(v.value, ',')) {
    const auto dash = part.find('-');
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    if (dash == std::string::npos) {
      if (!parse_int(part, a)) throw ConfigError(v.origin + ": bad seed '" + part + "'");
      out.push_back(a);
      continue;
    }
    if (!parse_int(std::string_view(part).substr(0, dash), a) || !parse_int(std::string_view(part).substr(dash + 1), b) ||
        b < a || b - a > 100000) {
      throw ConfigError(v.origin + ": bad seed range '" + part + "'");
    }
    for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError(v.origin + ": empty seed list");
  return out;
}

/// Re-throws library errors raised while interpreting a value with its origin attached.
template <class F>
auto with_origin(const ConfigValue& v, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(v.origin + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError(v.origin + ": " + e.what());
  }
}

}  // namespace detail

/// Builds and validates a RunConfig. `default_output` applies when no
/// output key is present.
inline RunConfig resolve(const ConfigMap& m, const std::filesystem::path& default_output = "runs") {
  RunConfig rc;
  rc.output = default_output;
  const auto get = [&](std::string_view full) -> const ConfigValue* {
    const auto it = m.find(std::string(full));
    return it == m.end() ? nullptr : &it->second;
  };
  using namespace detail;

  if (const auto* v = get("gridworld.task")) {
    rc.tasks = {with_origin(*v, [&] { return gridworld::parse_task(v->value); })};
  }
  if (const auto* v = get("gridworld.tasks")) {
    rc.tasks.clear();
    for (const auto& t : split_list(v->value, ';')) rc.tasks.push_back(with_origin(*v, [&] { return gridworld::parse_task(t); }));
    if (rc.tasks.empty()) throw ConfigError(v->origin + ": empty task list");
  }

  intrinsic::EngineConfig base;
  if (const auto* v = get("intrinsic.eta")) base.eta = to_double(*v, "eta");
  if (const auto* v = get("intrinsic.beta")) base.beta = to_double(*v, "beta");
  if (const auto* v = get("intrinsic.effect")) base.effect = with_origin(*v, [&] { return intrinsic::parse_effect_mode(v->value); });
  if (const auto* v = get("intrinsic.rnd_hidden")) base.rnd.hidden = static_cast<int>(to_u64(*v, "rnd_hidden"));
  if (const auto* v = get("intrinsic.rnd_output")) base.rnd.output = static_cast<int>(to_u64(*v, "rnd_output"));
  if (const auto* v = get("intrinsic.rnd_lr")) base.rnd.learning_rate = to_double(*v, "rnd_lr");
  if (base.rnd.hidden < 1 || base.rnd.output < 1 || !(base.rnd.learning_rate > 0.0)) {
    throw ConfigError("rnd_hidden, rnd_output and rnd_lr must be positive");
  }
  std::vector<std::string> kinds{"dowham"};
  const ConfigValue* engine_value = get("intrinsic.engine");
  if (engine_value) kinds = split_list(engine_value->value, ',');
  rc.engines.clear();
  for (const auto& k : kinds) {
    intrinsic::EngineConfig e = base;
    const ConfigValue origin = engine_value ? *engine_value : ConfigValue{k, "default"};
    e.kind = with_origin(origin, [&] { return intrinsic::parse_engine_kind(k); });
    // eta is validated for every engine so a bad value never slips through silently.
    const ConfigValue* eta_v = get("intrinsic.eta");
    with_origin(eta_v ? *eta_v : origin, [&] {
      intrinsic::check_eta(e.eta);
      e.validate();
      return 0;
    });
    rc.engines.push_back(e);
  }
  if (rc.engines.empty()) throw ConfigError("no engine given");

  auto& t = rc.train;
  if (const auto* v = get("agent.gamma")) t.gamma = to_double(*v, "gamma");
  if (const auto* v = get("agent.alpha")) t.alpha = to_double(*v, "alpha");
  if (const auto* v = get("agent.epsilon_start")) t.epsilon_start = to_double(*v, "epsilon_start");
  if (const auto* v = get("agent.epsilon_end")) t.epsilon_end = to_double(*v, "epsilon_end");
  if (const auto* v = get("agent.epsilon_decay_steps")) t.epsilon_decay_steps = to_u64(*v, "epsilon_decay_steps");
  if (const auto* v = get("agent.budget")) t.budget = to_u64(*v, "budget");
  if (const auto* v = get("agent.eval_every")) t.eval_every = to_u64(*v, "eval_every");
  if (const auto* v = get("agent.eval_episodes")) t.eval_episodes = static_cast<int>(to_u64(*v, "eval_episodes"));
  if (const auto* v = get("agent.eval_epsilon")) t.eval_epsilon = to_double(*v, "eval_epsilon");
  if (const auto* v = get("agent.state_key")) t.state_key = with_origin(*v, [&] { return agent::parse_state_key_mode(v->value); });
  if (const auto* v = get("agent.view_radius")) t.view_radius = static_cast<int>(to_u64(*v, "view_radius"));
  if (const auto* v = get("agent.q_init")) t.q_init = to_double(*v, "q_init");
  t.validate();

  if (const auto* v = get("experiments.seeds")) rc.seeds = parse_seeds(*v);
  if (const auto* v = get("experiments.levels")) {
    rc.levels.clear();
    for (const auto& l : split_list(v->value, ',')) {
      rc.levels.push_back(with_origin(*v, [&] { return gridworld::parse_ballpit_level(l); }));
    }
    if (rc.levels.empty()) throw ConfigError(v->origin + ": empty level list");
  }
  if (const auto* v = get("experiments.workers")) rc.workers = static_cast<unsigned>(to_u64(*v, "workers"));
  if (const auto* v = get("cli.output")) rc.output = v->value;
  if (const auto* v = get("cli.overwrite")) {
    rc.policy = to_bool(*v, "overwrite") ? experiments::OutputPolicy::overwrite : experiments::OutputPolicy::fail_if_exists;
  }
  return rc;
}

}  // namespace dowham::cli
