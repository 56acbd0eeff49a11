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
#include <vector>

#include "dowham/errors.hpp"
#include "dowham/gridworld/task.hpp"
#include "dowham/gridworld/types.hpp"
#include "dowham/hash.hpp"

namespace dowham::gridworld {

/// Digest of the canonical simulator state (cells, pose, inventory).
struct StateHash {
  std::uint64_t value = 0;
  friend constexpr bool operator==(StateHash, StateHash) = default;
  friend constexpr auto operator<=>(StateHash, StateHash) = default;
};

/// Complete simulator state. Value type: copying a world snapshots it.
struct GridWorld {
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;  // row-major, y * width + x
  AgentPose agent;
  std::optional<Item> inventory;
  int step_count = 0;
  int max_steps = 0;
  std::uint64_t rng_seed = 0;
  bool goal_reached = false;
  GoalCondition goal;
  TaskSpec task;

  GridWorld() = default;
  GridWorld(int w, int h) : width(w), height(h), cells(static_cast<std::size_t>(w * h), Cell::wall()) {}

  bool in_bounds(Vec2 p) const { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; }
  Cell& at(int x, int y) { return cells[static_cast<std::size_t>(y * width + x)]; }
  const Cell& at(int x, int y) const { return cells[static_cast<std::size_t>(y * width + x)]; }
  Cell& at(Vec2 p) { return at(p.x, p.y); }
  const Cell& at(Vec2 p) const { return at(p.x, p.y); }

  bool terminated() const { return goal_reached || step_count >= max_steps; }
};

struct ViewCell {
  Kind kind = Kind::unseen;
  Color color = Color::none;
  DoorState door_state = DoorState::none;
  friend constexpr bool operator==(const ViewCell&, const ViewCell&) = default;
};

/// Egocentric 7x7 window. Row 0 is farthest ahead; the agent sits at
/// (row 6, column 3) and looks towards row 0.
struct Observation {
  static constexpr int kSize = 7;
  static constexpr int kAgentRow = 6;
  static constexpr int kAgentCol = 3;
  std::array<ViewCell, kSize * kSize> view{};
  std::optional<Item> carried;

  const ViewCell& at(int row, int col) const { return view[static_cast<std::size_t>(row * kSize + col)]; }
  friend bool operator==(const Observation&, const Observation&) = default;
};

/// World coordinates of view cell (row, col) for an agent at `pose`.
inline Vec2 view_to_world(const AgentPose& pose, int row, int col) {
  const int ahead = Observation::kAgentRow - row;
  const int lateral = col - Observation::kAgentCol;
  return pose.pos() + ahead * direction_vector(pose.dir) + lateral * direction_vector(rotate_right(pose.dir));
}

inline Observation observe(const GridWorld& w) {
  constexpr int n = Observation::kSize;
  Observation obs;
  std::array<bool, n * n> visible{};
  std::array<int, n * n> queue{};
  int head = 0;
  int tail = 0;
  const int start = Observation::kAgentRow * n + Observation::kAgentCol;
  visible[start] = true;
  queue[tail++] = start;
  // Flood fill from the agent; opaque cells are seen but do not propagate.
  while (head < tail) {
    const int idx = queue[head++];
    const int row = idx / n;
    const int col = idx % n;
    const Vec2 p = view_to_world(w.agent, row, col);
    if (!w.in_bounds(p) || !w.at(p).see_through()) continue;
    constexpr std::array<std::array<int, 2>, 4> kSteps = {{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
    for (const auto& [dr, dc] : kSteps) {
      const int r2 = row + dr;
      const int c2 = col + dc;
      if (r2 < 0 || r2 >= n || c2 < 0 || c2 >= n) continue;
      const int j = r2 * n + c2;
      if (visible[j]) continue;
      if (!w.in_bounds(view_to_world(w.agent, r2, c2))) continue;
      visible[j] = true;
      queue[tail++] = j;
    }
  }
  for (int idx = 0; idx < n * n; ++idx) {
    if (!visible[idx]) continue;
    const Cell& c = w.at(view_to_world(w.agent, idx / n, idx % n));
    obs.view[idx] = ViewCell{c.kind, c.color, c.door_state};
  }
  obs.carried = w.inventory;
  return obs;
}

/// Digest of cells + pose + inventory; step counter, goal flag and seeds are excluded.
inline StateHash canonical_hash(const GridWorld& w) {
  Hasher h;
  h.add(static_cast<std::uint32_t>(w.width));
  h.add(static_cast<std::uint32_t>(w.height));
  for (const Cell& c : w.cells) h.add(c.packed());
  h.add(static_cast<std::uint32_t>(w.agent.x));
  h.add(static_cast<std::uint32_t>(w.agent.y));
  h.add(static_cast<std::uint32_t>(w.agent.dir));
  h.add(w.inventory ? (static_cast<std::uint32_t>(w.inventory->kind) | (static_cast<std::uint32_t>(w.inventory->color) << 8))
                    : 0xFFFFFFFFu);
  return {h.finish()};
}

inline std::uint64_t observation_hash(const Observation& obs) {
  Hasher h;
  for (const ViewCell& v : obs.view) {
    h.add(static_cast<std::uint32_t>(v.kind) | (static_cast<std::uint32_t>(v.color) << 8) |
          (static_cast<std::uint32_t>(v.door_state) << 16));
  }
  h.add(obs.carried ? (static_cast<std::uint32_t>(obs.carried->kind) | (static_cast<std::uint32_t>(obs.carried->color) << 8))
                    : 0xFFFFFFFFu);
  return h.finish();
}

/// Digest of everything visible around the agent (all headings) within a
/// square of half-width `radius`, expressed in the agent's frame, plus the
/// carried item. Independent of absolute position, unlike canonical_hash.
inline std::uint64_t local_view_hash(const GridWorld& w, int radius = 1) {
  if (radius < 1 || radius > 32) throw ContractViolation("local_view_hash: radius must be in [1, 32]");
  const int n = 2 * radius + 1;
  const Vec2 fwd = direction_vector(w.agent.dir);
  const Vec2 right = direction_vector(rotate_right(w.agent.dir));
  const auto to_world = [&](int idx) {
    const int ahead = radius - idx / n;
    const int lateral = idx % n - radius;
    return w.agent.pos() + ahead * fwd + lateral * right;
  };
  std::vector<char> visible(static_cast<std::size_t>(n * n), 0);
  std::vector<int> queue;
  queue.reserve(static_cast<std::size_t>(n * n));
  const int start = radius * n + radius;
  visible[static_cast<std::size_t>(start)] = 1;
  queue.push_back(start);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int idx = queue[head];
    const Vec2 p = to_world(idx);
    if (!w.in_bounds(p) || !w.at(p).see_through()) continue;
    const int row = idx / n;
    const int col = idx % n;
    constexpr std::array<std::array<int, 2>, 4> kSteps = {{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
    for (const auto& [dr, dc] : kSteps) {
      const int r2 = row + dr;
      const int c2 = col + dc;
      if (r2 < 0 || r2 >= n || c2 < 0 || c2 >= n) continue;
      const int j = r2 * n + c2;
      if (visible[static_cast<std::size_t>(j)] || !w.in_bounds(to_world(j))) continue;
      visible[static_cast<std::size_t>(j)] = 1;
      queue.push_back(j);
    }
  }
  Hasher h;
  h.add(static_cast<std::uint32_t>(radius));
  for (int idx = 0; idx < n * n; ++idx) {
    h.add(visible[static_cast<std::size_t>(idx)] ? w.at(to_world(idx)).packed() : 0xFFFFFFFFu);
  }
  h.add(w.inventory ? (static_cast<std::uint32_t>(w.inventory->kind) | (static_cast<std::uint32_t>(w.inventory->color) << 8)) + 1u : 0u);
  return h.finish();
}

struct Outcome {
  double reward = 0.0;
  bool done = false;
};

/// Applies one action in place. Success pays 1 - 0.9 * (steps before this one) / max_steps.
inline Outcome apply_action(GridWorld& w, Action action) {
  if (w.terminated()) throw ContractViolation("step called on a terminated episode");
  const int steps_before = w.step_count;
  ++w.step_count;
  const Vec2 front = w.agent.front();
  Cell* faced = w.in_bounds(front) ? &w.at(front) : nullptr;

  switch (action) {
    case Action::turn_left: w.agent.dir = rotate_left(w.agent.dir); break;
    case Action::turn_right: w.agent.dir = rotate_right(w.agent.dir); break;
    case Action::move_forward:
      if (faced && faced->walkable()) {
        w.agent.x = front.x;
        w.agent.y = front.y;
        if (faced->kind == Kind::goal && w.goal.type == GoalCondition::Type::reach_tile) w.goal_reached = true;
      }
      break;
    case Action::pickup:
      if (faced && !w.inventory && faced->pickable()) {
        w.inventory = Item{faced->kind, faced->color};
        *faced = Cell::floor();
        if (w.goal.type == GoalCondition::Type::pickup_object && w.inventory->kind == w.goal.object &&
            w.inventory->color == w.goal.color) {
          w.goal_reached = true;
        }
      }
      break;
    case Action::drop:
      // Only onto plain uncolored floor: never onto goal tiles or colored floor.
      if (faced && w.inventory && faced->kind == Kind::floor && faced->color == Color::none) {
        *faced = Cell{w.inventory->kind, w.inventory->color, DoorState::none, Color::none};
        w.inventory.reset();
      }
      break;
    case Action::toggle:
      if (!faced) break;
      if (faced->kind == Kind::door) {
        switch (faced->door_state) {
          case DoorState::open: faced->door_state = DoorState::closed; break;
          case DoorState::closed: faced->door_state = DoorState::open; break;
          case DoorState::locked:
            if (w.inventory && w.inventory->kind == Kind::key && w.inventory->color == faced->color) {
              faced->door_state = DoorState::open;
            }
            break;
          case DoorState::none: break;
        }
      } else if (faced->kind == Kind::box) {
        *faced = faced->hidden == Color::none ? Cell::floor() : Cell::key(faced->hidden);
      }
      break;
    case Action::done: break;
  }

  Outcome out;
  if (w.goal_reached) {
    out.reward = 1.0 - 0.9 * (static_cast<double>(steps_before) / static_cast<double>(w.max_steps));
  }
  out.done = w.terminated();
  return out;
}

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

inline StepResult step(GridWorld& w, Action action) {
  const Outcome o = apply_action(w, action);
  return {observe(w), o.reward, o.done};
}

}  // namespace dowham::gridworld
