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

#include <sstream>
#include <string>
#include <string_view>

#include "dowham/errors.hpp"
#include "dowham/gridworld/task.hpp"
#include "dowham/gridworld/world.hpp"

namespace dowham::gridworld {

// Map snapshot: versioned plain text, two characters per cell (kind, color).
//
//   dowham-map v1
//   task keycorridor:3,1
//   size 7 3
//   agent 3 1 north
//   carrying none
//   steps 0 90
//   goal pickup ball green
//   grid
//   ##############
//   ...
//   hidden 4 2 red      (one line per box that hides a key)
//   end

namespace detail {

inline char kind_char(const Cell& c) {
  switch (c.kind) {
    case Kind::unseen: return '?';
    case Kind::floor: return '.';
    case Kind::wall: return '#';
    case Kind::door:
      return c.door_state == DoorState::open ? '/' : c.door_state == DoorState::closed ? '+' : 'L';
    case Kind::key: return 'k';
    case Kind::ball: return 'o';
    case Kind::box: return 'x';
    case Kind::goal: return 'G';
  }
  return '?';
}

inline char color_char(Color c) {
  switch (c) {
    case Color::none: return '.';
    case Color::red: return 'r';
    case Color::green: return 'g';
    case Color::blue: return 'b';
    case Color::purple: return 'p';
    case Color::yellow: return 'y';
    case Color::grey: return 'e';
  }
  return '?';
}

inline Color color_from_char(char ch) {
  for (int i = 0; i <= 6; ++i) {
    if (color_char(static_cast<Color>(i)) == ch) return static_cast<Color>(i);
  }
  throw ContractViolation(std::string("snapshot: bad color char '") + ch + "'");
}

inline Cell cell_from_chars(char k, char c) {
  const Color color = color_from_char(c);
  switch (k) {
    case '.': return Cell::floor(color);
    case '#': return Cell::wall();
    case '/': return Cell::door(color, DoorState::open);
    case '+': return Cell::door(color, DoorState::closed);
    case 'L': return Cell::door(color, DoorState::locked);
    case 'k': return Cell::key(color);
    case 'o': return Cell::ball(color);
    case 'x': return Cell::box(color);
    case 'G': return Cell::goal();
    default: throw ContractViolation(std::string("snapshot: bad kind char '") + k + "'");
  }
}

}  // namespace detail

inline std::string to_snapshot(const GridWorld& w) {
  std::ostringstream os;
  os << "dowham-map v1\n";
  os << "task " << to_string(w.task) << "\n";
  os << "size " << w.width << " " << w.height << "\n";
  os << "agent " << w.agent.x << " " << w.agent.y << " " << to_string(w.agent.dir) << "\n";
  if (w.inventory) {
    os << "carrying " << to_string(w.inventory->kind) << " " << to_string(w.inventory->color) << "\n";
  } else {
    os << "carrying none\n";
  }
  os << "steps " << w.step_count << " " << w.max_steps << "\n";
  switch (w.goal.type) {
    case GoalCondition::Type::none: os << "goal none\n"; break;
    case GoalCondition::Type::reach_tile: os << "goal reach_tile\n"; break;
    case GoalCondition::Type::pickup_object:
      os << "goal pickup " << to_string(w.goal.object) << " " << to_string(w.goal.color) << "\n";
      break;
  }
  os << "grid\n";
  for (int y = 0; y < w.height; ++y) {
    for (int x = 0; x < w.width; ++x) {
      const Cell& c = w.at(x, y);
      os << detail::kind_char(c) << detail::color_char(c.kind == Kind::goal ? Color::none : c.color);
    }
    os << "\n";
  }
  for (int y = 0; y < w.height; ++y) {
    for (int x = 0; x < w.width; ++x) {
      const Cell& c = w.at(x, y);
      if (c.kind == Kind::box && c.hidden != Color::none) {
        os << "hidden " << x << " " << y << " " << to_string(c.hidden) << "\n";
      }
    }
  }
  os << "end\n";
  return os.str();
}

/// Parses a snapshot back into a world (step counter, goal and task included; rng_seed is 0).
inline GridWorld parse_snapshot(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  auto fail = [](const std::string& why) -> GridWorld { throw ContractViolation("snapshot: " + why); };
  if (!std::getline(is, line) || line != "dowham-map v1") return fail("missing 'dowham-map v1' header");
  GridWorld w;
  std::string word;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    ls >> word;
    if (word == "task") {
      std::string spec;
      ls >> spec;
      w.task = parse_task(spec);
    } else if (word == "size") {
      ls >> w.width >> w.height;
      if (!ls || w.width <= 0 || w.height <= 0) return fail("bad size");
      w.cells.assign(static_cast<std::size_t>(w.width * w.height), Cell::wall());
    } else if (word == "agent") {
      std::string dir;
      ls >> w.agent.x >> w.agent.y >> dir;
      const auto d = direction_from_string(dir);
      if (!ls || !d) return fail("bad agent line");
      w.agent.dir = *d;
    } else if (word == "carrying") {
      std::string kind, color;
      ls >> kind;
      if (kind != "none") {
        ls >> color;
        const auto k = kind_from_string(kind);
        const auto c = color_from_string(color);
        if (!k || !c) return fail("bad carrying line");
        w.inventory = Item{*k, *c};
      }
    } else if (word == "steps") {
      ls >> w.step_count >> w.max_steps;
      if (!ls) return fail("bad steps line");
    } else if (word == "goal") {
      std::string type;
      ls >> type;
      if (type == "none") {
        w.goal = GoalCondition{};
      } else if (type == "reach_tile") {
        w.goal = GoalCondition::reach_tile();
      } else if (type == "pickup") {
        std::string kind, color;
        ls >> kind >> color;
        const auto k = kind_from_string(kind);
        const auto c = color_from_string(color);
        if (!k || !c) return fail("bad goal line");
        w.goal = GoalCondition::pickup(*k, *c);
      } else {
        return fail("bad goal type '" + type + "'");
      }
    } else if (word == "grid") {
      if (w.cells.empty()) return fail("grid before size");
      for (int y = 0; y < w.height; ++y) {
        if (!std::getline(is, line) || static_cast<int>(line.size()) != 2 * w.width) return fail("bad grid row");
        for (int x = 0; x < w.width; ++x) {
          w.at(x, y) = detail::cell_from_chars(line[static_cast<std::size_t>(2 * x)], line[static_cast<std::size_t>(2 * x + 1)]);
        }
      }
    } else if (word == "hidden") {
      int x = 0, y = 0;
      std::string color;
      ls >> x >> y >> color;
      const auto c = color_from_string(color);
      if (!ls || !c || !w.in_bounds({x, y}) || w.at(x, y).kind != Kind::box) return fail("bad hidden line");
      w.at(x, y).hidden = *c;
    } else if (word == "end") {
      return w;
    } else {
      return fail("unknown line '" + line + "'");
    }
  }
  return fail("missing 'end'");
}

}  // namespace dowham::gridworld
