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
#include <string>
#include <string_view>
#include <vector>

#include "dowham/errors.hpp"
#include "dowham/hash.hpp"

namespace dowham::gridworld {

enum class Family : std::uint8_t { multiroom, keycorridor, obstructed, playground, ballpit, colormaze };

enum class BallPitLevel : std::uint8_t { no_ball, small, more, max };

/// Family plus generator parameters. Textual form, e.g. `multiroom:2,4`,
/// `keycorridor:3,2`, `obstructed:2,lhb`, `ballpit:max`, `playground`, `colormaze`.
struct TaskSpec {
  Family family = Family::multiroom;
  int n_rooms = 2;        // multiroom
  int max_size = 4;       // multiroom
  int room_size = 3;      // keycorridor
  int rows = 1;           // keycorridor
  int grid_rooms = 2;     // obstructed
  bool locked = true;     // obstructed
  bool boxed_keys = false;
  bool blockers = false;
  BallPitLevel level = BallPitLevel::no_ball;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;

  static TaskSpec multiroom(int n, int s) {
    TaskSpec t;
    t.family = Family::multiroom;
    t.n_rooms = n;
    t.max_size = s;
    return t;
  }
  static TaskSpec keycorridor(int s, int r) {
    TaskSpec t;
    t.family = Family::keycorridor;
    t.room_size = s;
    t.rows = r;
    return t;
  }
  static TaskSpec obstructed(int rooms, bool locked, bool boxed, bool blockers) {
    TaskSpec t;
    t.family = Family::obstructed;
    t.grid_rooms = rooms;
    t.locked = locked;
    t.boxed_keys = boxed;
    t.blockers = blockers;
    return t;
  }
  static TaskSpec playground() {
    TaskSpec t;
    t.family = Family::playground;
    return t;
  }
  static TaskSpec ballpit(BallPitLevel level) {
    TaskSpec t;
    t.family = Family::ballpit;
    t.level = level;
    return t;
  }
  static TaskSpec colormaze() {
    TaskSpec t;
    t.family = Family::colormaze;
    return t;
  }
};

inline std::string_view to_string(BallPitLevel level) {
  switch (level) {
    case BallPitLevel::no_ball: return "no_ball";
    case BallPitLevel::small: return "small";
    case BallPitLevel::more: return "more";
    case BallPitLevel::max: return "max";
  }
  return "?";
}

inline BallPitLevel parse_ballpit_level(std::string_view s) {
  for (auto level : {BallPitLevel::no_ball, BallPitLevel::small, BallPitLevel::more, BallPitLevel::max}) {
    if (to_string(level) == s) return level;
  }
  throw ConfigError("unknown ballpit level '" + std::string(s) + "' (expected no_ball|small|more|max)");
}

inline std::string to_string(const TaskSpec& t) {
  switch (t.family) {
    case Family::multiroom:
      return "multiroom:" + std::to_string(t.n_rooms) + "," + std::to_string(t.max_size);
    case Family::keycorridor:
      return "keycorridor:" + std::to_string(t.room_size) + "," + std::to_string(t.rows);
    case Family::obstructed: {
      std::string flags;
      if (t.locked) flags += 'l';
      if (t.boxed_keys) flags += 'h';
      if (t.blockers) flags += 'b';
      return "obstructed:" + std::to_string(t.grid_rooms) + (flags.empty() ? "" : "," + flags);
    }
    case Family::playground: return "playground";
    case Family::ballpit: return "ballpit:" + std::string(to_string(t.level));
    case Family::colormaze: return "colormaze";
  }
  return "?";
}

/// Directory-safe name for output layouts (`multiroom-2-4`).
inline std::string task_slug(const TaskSpec& t) {
  std::string s = to_string(t);
  for (char& c : s) {
    if (c == ':' || c == ',') c = '-';
  }
  return s;
}

namespace detail {
inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline int parse_task_int(std::string_view s, std::string_view what) {
  int v = 0;
  if (!parse_int(s, v)) throw ConfigError("task: expected integer for " + std::string(what) + ", got '" + std::string(s) + "'");
  return v;
}
}  // namespace detail

inline TaskSpec parse_task(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view family = text.substr(0, colon);
  const std::string_view args = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const auto parts = args.empty() ? std::vector<std::string_view>{} : detail::split(args, ',');
  auto expect = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi) {
      throw ConfigError("task '" + std::string(text) + "': wrong number of parameters");
    }
  };
  if (family == "multiroom") {
    expect(2, 2);
    return TaskSpec::multiroom(detail::parse_task_int(parts[0], "n_rooms"), detail::parse_task_int(parts[1], "max_size"));
  }
  if (family == "keycorridor") {
    expect(2, 2);
    return TaskSpec::keycorridor(detail::parse_task_int(parts[0], "room_size"), detail::parse_task_int(parts[1], "rows"));
  }
  if (family == "obstructed") {
    expect(1, 2);
    TaskSpec t = TaskSpec::obstructed(detail::parse_task_int(parts[0], "grid_rooms"), false, false, false);
    if (parts.size() == 2) {
      for (char c : parts[1]) {
        switch (c) {
          case 'l': t.locked = true; break;
          case 'h': t.boxed_keys = true; break;
          case 'b': t.blockers = true; break;
          default: throw ConfigError("task '" + std::string(text) + "': unknown obstructed flag '" + std::string(1, c) + "'");
        }
      }
    }
    return t;
  }
  if (family == "ballpit") {
    expect(1, 1);
    return TaskSpec::ballpit(parse_ballpit_level(parts[0]));
  }
  if (family == "playground") {
    expect(0, 0);
    return TaskSpec::playground();
  }
  if (family == "colormaze") {
    expect(0, 0);
    return TaskSpec::colormaze();
  }
  throw ConfigError("unknown task family '" + std::string(family) + "'");
}

}  // namespace dowham::gridworld
