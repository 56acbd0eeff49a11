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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "dowham/errors.hpp"

namespace dowham::gridworld {

/// Contents of one grid cell. `unseen` only appears in observations.
enum class Kind : std::uint8_t { unseen = 0, floor, wall, door, key, ball, box, goal };

enum class Color : std::uint8_t { none = 0, red, green, blue, purple, yellow, grey };
inline constexpr std::array<Color, 6> kPalette = {Color::red,    Color::green,  Color::blue,
                                                  Color::purple, Color::yellow, Color::grey};

enum class DoorState : std::uint8_t { none = 0, open, closed, locked };

/// The seven discrete actions. The integer values are the serialized ids.
enum class Action : std::uint8_t {
  turn_left = 0,
  turn_right = 1,
  move_forward = 2,
  pickup = 3,
  drop = 4,
  toggle = 5,
  done = 6,
};
inline constexpr std::size_t kNumActions = 7;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::turn_left, Action::turn_right, Action::move_forward, Action::pickup,
    Action::drop,      Action::toggle,     Action::done};

/// Cardinal orientation, clockwise from east (y grows downwards).
enum class Direction : std::uint8_t { east = 0, south = 1, west = 2, north = 3 };

struct Vec2 {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(Vec2, Vec2) = default;
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator*(int k, Vec2 v) { return {k * v.x, k * v.y}; }
};

constexpr Vec2 direction_vector(Direction d) {
  switch (d) {
    case Direction::east: return {1, 0};
    case Direction::south: return {0, 1};
    case Direction::west: return {-1, 0};
    case Direction::north: return {0, -1};
  }
  return {0, 0};
}

constexpr Direction rotate_right(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 1) % 4);
}
constexpr Direction rotate_left(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 3) % 4);
}

struct Cell {
  Kind kind = Kind::floor;
  Color color = Color::none;
  DoorState door_state = DoorState::none;
  /// Key color hidden inside a box; `none` for an empty box and for every other kind.
  Color hidden = Color::none;

  friend constexpr bool operator==(const Cell&, const Cell&) = default;

  static constexpr Cell floor(Color c = Color::none) { return {Kind::floor, c, DoorState::none, Color::none}; }
  static constexpr Cell wall() { return {Kind::wall, Color::none, DoorState::none, Color::none}; }
  static constexpr Cell goal() { return {Kind::goal, Color::none, DoorState::none, Color::none}; }
  static constexpr Cell door(Color c, DoorState s) { return {Kind::door, c, s, Color::none}; }
  static constexpr Cell key(Color c) { return {Kind::key, c, DoorState::none, Color::none}; }
  static constexpr Cell ball(Color c) { return {Kind::ball, c, DoorState::none, Color::none}; }
  static constexpr Cell box(Color c, Color hidden_key = Color::none) {
    return {Kind::box, c, DoorState::none, hidden_key};
  }

  constexpr bool walkable() const {
    return kind == Kind::floor || kind == Kind::goal || (kind == Kind::door && door_state == DoorState::open);
  }
  constexpr bool see_through() const {
    return kind != Kind::wall && !(kind == Kind::door && door_state != DoorState::open);
  }
  constexpr bool pickable() const { return kind == Kind::key || kind == Kind::ball; }

  constexpr std::uint32_t packed() const {
    return static_cast<std::uint32_t>(kind) | (static_cast<std::uint32_t>(color) << 8) |
           (static_cast<std::uint32_t>(door_state) << 16) | (static_cast<std::uint32_t>(hidden) << 24);
  }
};

/// Object held by the agent (key or ball).
struct Item {
  Kind kind = Kind::key;
  Color color = Color::none;
  friend constexpr bool operator==(const Item&, const Item&) = default;
};

struct AgentPose {
  int x = 0;
  int y = 0;
  Direction dir = Direction::east;
  friend constexpr bool operator==(const AgentPose&, const AgentPose&) = default;
  constexpr Vec2 pos() const { return {x, y}; }
  constexpr Vec2 front() const { return pos() + direction_vector(dir); }
};

/// What ends an episode with success.
struct GoalCondition {
  enum class Type : std::uint8_t { none, reach_tile, pickup_object };
  Type type = Type::none;
  Kind object = Kind::ball;
  Color color = Color::none;
  friend constexpr bool operator==(const GoalCondition&, const GoalCondition&) = default;

  static constexpr GoalCondition reach_tile() { return {Type::reach_tile, Kind::goal, Color::none}; }
  static constexpr GoalCondition pickup(Kind k, Color c) { return {Type::pickup_object, k, c}; }
};

inline std::string_view to_string(Action a) {
  switch (a) {
    case Action::turn_left: return "turn_left";
    case Action::turn_right: return "turn_right";
    case Action::move_forward: return "move_forward";
    case Action::pickup: return "pickup";
    case Action::drop: return "drop";
    case Action::toggle: return "toggle";
    case Action::done: return "done";
  }
  return "?";
}

inline std::string_view to_string(Color c) {
  switch (c) {
    case Color::none: return "none";
    case Color::red: return "red";
    case Color::green: return "green";
    case Color::blue: return "blue";
    case Color::purple: return "purple";
    case Color::yellow: return "yellow";
    case Color::grey: return "grey";
  }
  return "?";
}

inline std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::unseen: return "unseen";
    case Kind::floor: return "floor";
    case Kind::wall: return "wall";
    case Kind::door: return "door";
    case Kind::key: return "key";
    case Kind::ball: return "ball";
    case Kind::box: return "box";
    case Kind::goal: return "goal";
  }
  return "?";
}

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::east: return "east";
    case Direction::south: return "south";
    case Direction::west: return "west";
    case Direction::north: return "north";
  }
  return "?";
}

inline Action action_from_id(int id) {
  if (id < 0 || id >= static_cast<int>(kNumActions)) {
    throw ContractViolation("action id out of range: " + std::to_string(id));
  }
  return static_cast<Action>(id);
}

inline std::optional<Color> color_from_string(std::string_view s) {
  for (int i = 0; i <= 6; ++i) {
    if (to_string(static_cast<Color>(i)) == s) return static_cast<Color>(i);
  }
  return std::nullopt;
}

inline std::optional<Kind> kind_from_string(std::string_view s) {
  for (int i = 0; i <= 7; ++i) {
    if (to_string(static_cast<Kind>(i)) == s) return static_cast<Kind>(i);
  }
  return std::nullopt;
}

inline std::optional<Direction> direction_from_string(std::string_view s) {
  for (int i = 0; i < 4; ++i) {
    if (to_string(static_cast<Direction>(i)) == s) return static_cast<Direction>(i);
  }
  return std::nullopt;
}

}  // namespace dowham::gridworld
