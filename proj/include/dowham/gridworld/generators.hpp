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
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "dowham/errors.hpp"
#include "dowham/gridworld/task.hpp"
#include "dowham/gridworld/types.hpp"
#include "dowham/gridworld/world.hpp"
#include "dowham/rng.hpp"

namespace dowham::gridworld {

inline constexpr int kGeneratorAttempts = 64;

/// Axis-aligned room, walls included.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  bool contains(Vec2 p) const { return p.x >= x && p.y >= y && p.x < x + w && p.y < y + h; }
  bool interior_contains(Vec2 p) const { return p.x > x && p.y > y && p.x < x + w - 1 && p.y < y + h - 1; }
  bool intersects(const Rect& o) const {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
};

namespace detail {

inline Color random_color(Rng& rng) { return kPalette[rng.index(kPalette.size())]; }

inline Direction random_direction(Rng& rng) { return static_cast<Direction>(rng.uniform_int(0, 3)); }

inline void carve(GridWorld& w, const Rect& r, Color floor = Color::none) {
  for (int y = r.y + 1; y < r.y + r.h - 1; ++y) {
    for (int x = r.x + 1; x < r.x + r.w - 1; ++x) w.at(x, y) = Cell::floor(floor);
  }
}

inline std::vector<Vec2> interior(const Rect& r) {
  std::vector<Vec2> out;
  for (int y = r.y + 1; y < r.y + r.h - 1; ++y) {
    for (int x = r.x + 1; x < r.x + r.w - 1; ++x) out.push_back({x, y});
  }
  return out;
}

/// Interior cells that are plain floor and not listed in `reserved`.
inline std::vector<Vec2> free_cells(const GridWorld& w, const Rect& r, const std::vector<Vec2>& reserved) {
  std::vector<Vec2> out;
  for (Vec2 p : interior(r)) {
    if (w.at(p).kind != Kind::floor) continue;
    if (std::find(reserved.begin(), reserved.end(), p) != reserved.end()) continue;
    out.push_back(p);
  }
  return out;
}

inline std::optional<Vec2> pick_free(Rng& rng, const GridWorld& w, const Rect& r, const std::vector<Vec2>& reserved) {
  auto cells = free_cells(w, r, reserved);
  if (cells.empty()) return std::nullopt;
  return cells[rng.index(cells.size())];
}

inline void neighbours_of(Vec2 p, std::vector<Vec2>& out) {
  for (int d = 0; d < 4; ++d) out.push_back(p + direction_vector(static_cast<Direction>(d)));
}

struct MultiRoomLayout {
  GridWorld world;
  std::vector<Rect> rooms;
  std::vector<Vec2> doors;
};

inline std::optional<MultiRoomLayout> try_multiroom(int n_rooms, int max_size, Rng& rng) {
  constexpr int kGrid = 25;
  constexpr int kPlacementTries = 40;
  std::vector<Rect> rooms;
  std::vector<int> entry_side;
  std::vector<Vec2> doors;

  const int w0 = static_cast<int>(rng.uniform_int(4, max_size));
  const int h0 = static_cast<int>(rng.uniform_int(4, max_size));
  rooms.push_back({static_cast<int>(rng.uniform_int(0, kGrid - w0)), static_cast<int>(rng.uniform_int(0, kGrid - h0)), w0, h0});
  entry_side.push_back(-1);

  for (int i = 1; i < n_rooms; ++i) {
    bool placed = false;
    for (int t = 0; t < kPlacementTries && !placed; ++t) {
      const Rect prev = rooms.back();
      const int side = static_cast<int>(rng.uniform_int(0, 3));
      if (side == entry_side.back()) continue;
      const int sw = static_cast<int>(rng.uniform_int(4, max_size));
      const int sh = static_cast<int>(rng.uniform_int(4, max_size));
      Vec2 door{};
      Rect next{0, 0, sw, sh};
      switch (side) {
        case 0:  // east
          door = {prev.x + prev.w - 1, static_cast<int>(rng.uniform_int(prev.y + 1, prev.y + prev.h - 2))};
          next.x = door.x;
          next.y = door.y - static_cast<int>(rng.uniform_int(1, sh - 2));
          break;
        case 1:  // south
          door = {static_cast<int>(rng.uniform_int(prev.x + 1, prev.x + prev.w - 2)), prev.y + prev.h - 1};
          next.y = door.y;
          next.x = door.x - static_cast<int>(rng.uniform_int(1, sw - 2));
          break;
        case 2:  // west
          door = {prev.x, static_cast<int>(rng.uniform_int(prev.y + 1, prev.y + prev.h - 2))};
          next.x = door.x - sw + 1;
          next.y = door.y - static_cast<int>(rng.uniform_int(1, sh - 2));
          break;
        default:  // north
          door = {static_cast<int>(rng.uniform_int(prev.x + 1, prev.x + prev.w - 2)), prev.y};
          next.y = door.y - sh + 1;
          next.x = door.x - static_cast<int>(rng.uniform_int(1, sw - 2));
          break;
      }
      if (next.x < 0 || next.y < 0 || next.x + next.w > kGrid || next.y + next.h > kGrid) continue;
      bool clash = false;
      for (std::size_t j = 0; j + 1 < rooms.size(); ++j) clash = clash || next.intersects(rooms[j]);
      if (clash) continue;
      rooms.push_back(next);
      entry_side.push_back((side + 2) % 4);
      doors.push_back(door);
      placed = true;
    }
    if (!placed) return std::nullopt;
  }

  MultiRoomLayout layout;
  layout.world = GridWorld(kGrid, kGrid);
  for (const Rect& r : rooms) carve(layout.world, r);
  for (Vec2 d : doors) layout.world.at(d) = Cell::door(random_color(rng), DoorState::closed);

  auto first = interior(rooms.front());
  const Vec2 start = first[rng.index(first.size())];
  layout.world.agent = AgentPose{start.x, start.y, random_direction(rng)};
  auto last = interior(rooms.back());
  layout.world.at(last[rng.index(last.size())]) = Cell::goal();
  layout.rooms = std::move(rooms);
  layout.doors = std::move(doors);
  return layout;
}

inline MultiRoomLayout multiroom_layout(int n_rooms, int max_size, std::uint64_t seed) {
  if (n_rooms < 2) throw ContractViolation("multiroom: n_rooms must be >= 2");
  if (max_size < 4) throw ContractViolation("multiroom: max_size must be >= 4");
  if (max_size > 12) throw ContractViolation("multiroom: max_size must be <= 12 to fit the 25x25 grid");
  Rng rng(seed);
  for (int attempt = 0; attempt < kGeneratorAttempts; ++attempt) {
    if (auto layout = try_multiroom(n_rooms, max_size, rng)) {
      GridWorld& w = layout->world;
      w.max_steps = 20 * n_rooms * max_size;
      w.rng_seed = seed;
      w.goal = GoalCondition::reach_tile();
      w.task = TaskSpec::multiroom(n_rooms, max_size);
      return std::move(*layout);
    }
  }
  throw GeneratorError("multiroom: no layout after " + std::to_string(kGeneratorAttempts) + " attempts");
}

/// Shortest walkable route from the agent to the goal tile, doors treated as passable.
inline std::vector<Vec2> route_to_goal(const GridWorld& w) {
  std::vector<int> parent(w.cells.size(), -1);
  std::vector<bool> seen(w.cells.size(), false);
  std::deque<Vec2> queue;
  const Vec2 start = w.agent.pos();
  seen[static_cast<std::size_t>(start.y * w.width + start.x)] = true;
  queue.push_back(start);
  while (!queue.empty()) {
    const Vec2 p = queue.front();
    queue.pop_front();
    if (w.at(p).kind == Kind::goal) {
      std::vector<Vec2> path;
      for (int idx = p.y * w.width + p.x; idx != -1; idx = parent[static_cast<std::size_t>(idx)]) {
        path.push_back({idx % w.width, idx / w.width});
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (int d = 0; d < 4; ++d) {
      const Vec2 q = p + direction_vector(static_cast<Direction>(d));
      if (!w.in_bounds(q)) continue;
      const auto qi = static_cast<std::size_t>(q.y * w.width + q.x);
      const Cell& c = w.at(q);
      if (seen[qi] || !(c.kind == Kind::floor || c.kind == Kind::goal || c.kind == Kind::door)) continue;
      seen[qi] = true;
      parent[qi] = p.y * w.width + p.x;
      queue.push_back(q);
    }
  }
  return {};
}

}  // namespace detail

/// Relaxed solvability guard used by the generators: flood fill where any
/// object is removable and a locked door opens once a matching key (loose or
/// boxed) has been reached. Ignores the one-item carry limit.
inline bool goal_reachable_relaxed(const GridWorld& w) {
  if (w.goal.type == GoalCondition::Type::none) return true;
  std::vector<bool> seen(w.cells.size(), false);
  std::array<bool, 7> keys{};
  if (w.inventory && w.inventory->kind == Kind::key) keys[static_cast<std::size_t>(w.inventory->color)] = true;
  bool grew = true;
  while (grew) {
    grew = false;
    std::fill(seen.begin(), seen.end(), false);
    std::deque<Vec2> queue{w.agent.pos()};
    seen[static_cast<std::size_t>(w.agent.y * w.width + w.agent.x)] = true;
    while (!queue.empty()) {
      const Vec2 p = queue.front();
      queue.pop_front();
      const Cell& c = w.at(p);
      if (w.goal.type == GoalCondition::Type::reach_tile && c.kind == Kind::goal) return true;
      if (w.goal.type == GoalCondition::Type::pickup_object && c.kind == w.goal.object && c.color == w.goal.color) {
        return true;
      }
      auto learn = [&](Color k) {
        if (k != Color::none && !keys[static_cast<std::size_t>(k)]) {
          keys[static_cast<std::size_t>(k)] = true;
          grew = true;
        }
      };
      if (c.kind == Kind::key) learn(c.color);
      if (c.kind == Kind::box) learn(c.hidden);
      // Objects are entered (as if cleared) but walls and unopenable doors are not.
      for (int d = 0; d < 4; ++d) {
        const Vec2 q = p + direction_vector(static_cast<Direction>(d));
        if (!w.in_bounds(q)) continue;
        const auto qi = static_cast<std::size_t>(q.y * w.width + q.x);
        if (seen[qi]) continue;
        const Cell& n = w.at(q);
        if (n.kind == Kind::wall) continue;
        if (n.kind == Kind::door && n.door_state == DoorState::locked && !keys[static_cast<std::size_t>(n.color)]) continue;
        seen[qi] = true;
        queue.push_back(q);
      }
    }
  }
  return false;
}

inline GridWorld new_multiroom(int n_rooms, int max_size, std::uint64_t seed) {
  return detail::multiroom_layout(n_rooms, max_size, seed).world;
}

inline GridWorld new_keycorridor(int room_size, int rows, std::uint64_t seed) {
  if (room_size < 3) throw ContractViolation("keycorridor: room_size must be >= 3");
  if (rows < 1) throw ContractViolation("keycorridor: rows must be >= 1");
  if (room_size > 10 || rows > 6) throw ContractViolation("keycorridor: room_size <= 10 and rows <= 6");
  Rng rng(seed);
  const int step = room_size - 1;
  for (int attempt = 0; attempt < kGeneratorAttempts; ++attempt) {
    GridWorld w(3 * step + 1, rows * step + 1);
    std::vector<Rect> side_rooms;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < 3; ++c) {
        const Rect room{c * step, r * step, room_size, room_size};
        detail::carve(w, room);
        if (c != 1) side_rooms.push_back(room);
      }
      if (r + 1 < rows) {
        for (int x = step + 1; x < 2 * step; ++x) w.at(x, (r + 1) * step) = Cell::floor();
      }
    }
    std::vector<Vec2> doors;
    for (const Rect& room : side_rooms) {
      const int x = room.x == 0 ? step : 2 * step;
      const int y = static_cast<int>(rng.uniform_int(room.y + 1, room.y + room.h - 2));
      doors.push_back({x, y});
      w.at(x, y) = Cell::door(detail::random_color(rng), DoorState::closed);
    }
    const std::size_t locked = rng.index(side_rooms.size());
    std::size_t key_room = rng.index(side_rooms.size() - 1);
    if (key_room >= locked) ++key_room;
    Cell& locked_door = w.at(doors[locked]);
    locked_door.door_state = DoorState::locked;
    const Color key_color = locked_door.color;

    auto ball_cells = detail::interior(side_rooms[locked]);
    w.at(ball_cells[rng.index(ball_cells.size())]) = Cell::ball(Color::green);
    auto key_cells = detail::interior(side_rooms[key_room]);
    w.at(key_cells[rng.index(key_cells.size())]) = Cell::key(key_color);

    const int x = static_cast<int>(rng.uniform_int(step + 1, 2 * step - 1));
    const int y = static_cast<int>(rng.uniform_int(1, w.height - 2));
    w.agent = AgentPose{x, y, detail::random_direction(rng)};
    w.max_steps = 30 * room_size * rows;
    w.rng_seed = seed;
    w.goal = GoalCondition::pickup(Kind::ball, Color::green);
    w.task = TaskSpec::keycorridor(room_size, rows);
    if (goal_reachable_relaxed(w)) return w;
  }
  throw GeneratorError("keycorridor: no solvable layout after " + std::to_string(kGeneratorAttempts) + " attempts");
}

inline GridWorld new_obstructed_rooms(int grid_rooms, bool locked, bool boxed_keys, bool blockers, std::uint64_t seed) {
  if (grid_rooms < 1 || grid_rooms > 9) throw ContractViolation("obstructed: grid_rooms must be in 1..9");
  if ((boxed_keys || blockers) && !locked) {
    throw ContractViolation("obstructed: boxed keys and blockers require a locked layout");
  }
  constexpr int kRoomSize = 6;
  constexpr int kStep = kRoomSize - 1;
  const int cols = std::min(grid_rooms, 3);
  const int rows = (grid_rooms + 2) / 3;
  Rng rng(seed);

  for (int attempt = 0; attempt < kGeneratorAttempts; ++attempt) {
    GridWorld w(cols * kStep + 1, rows * kStep + 1);
    std::vector<Rect> rooms;
    for (int i = 0; i < grid_rooms; ++i) {
      rooms.push_back({(i % 3) * kStep, (i / 3) * kStep, kRoomSize, kRoomSize});
      detail::carve(w, rooms.back());
    }

    // Random spanning tree over grid-adjacent rooms (randomized Prim from room 0).
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < grid_rooms; ++i) {
      if (i % 3 != 2 && i + 1 < grid_rooms) edges.emplace_back(i, i + 1);
      if (i + 3 < grid_rooms) edges.emplace_back(i, i + 3);
    }
    std::vector<bool> in_tree(static_cast<std::size_t>(grid_rooms), false);
    in_tree[0] = true;
    std::vector<std::pair<int, int>> tree;  // (parent, child)
    while (static_cast<int>(tree.size()) + 1 < grid_rooms) {
      std::vector<std::pair<int, int>> frontier;
      for (auto [a, b] : edges) {
        if (in_tree[static_cast<std::size_t>(a)] != in_tree[static_cast<std::size_t>(b)]) {
          frontier.push_back(in_tree[static_cast<std::size_t>(a)] ? std::pair{a, b} : std::pair{b, a});
        }
      }
      const auto e = frontier[rng.index(frontier.size())];
      in_tree[static_cast<std::size_t>(e.second)] = true;
      tree.push_back(e);
    }
    // Prim adds children after their parents, so `tree` is already a valid processing order.
    std::vector<int> parent(static_cast<std::size_t>(grid_rooms), -1);
    std::vector<int> depth(static_cast<std::size_t>(grid_rooms), 0);
    for (auto [p, c] : tree) {
      parent[static_cast<std::size_t>(c)] = p;
      depth[static_cast<std::size_t>(c)] = depth[static_cast<std::size_t>(p)] + 1;
    }
    const int deepest = *std::max_element(depth.begin(), depth.end());
    std::vector<int> candidates;
    for (int i = 0; i < grid_rooms; ++i) {
      if (depth[static_cast<std::size_t>(i)] == deepest) candidates.push_back(i);
    }
    const int ball_room = candidates[rng.index(candidates.size())];
    std::vector<bool> on_path(static_cast<std::size_t>(grid_rooms), false);
    for (int r = ball_room; r != -1; r = parent[static_cast<std::size_t>(r)]) on_path[static_cast<std::size_t>(r)] = true;

    // Doors on tree edges; cells on both sides of every door stay clear.
    std::vector<Vec2> reserved;
    std::vector<Vec2> door_pos;
    std::vector<Vec2> parent_side;
    for (auto [p, c] : tree) {
      const Rect& a = rooms[static_cast<std::size_t>(p)];
      const Rect& b = rooms[static_cast<std::size_t>(c)];
      Vec2 d{};
      Vec2 front{};
      if (a.y == b.y) {  // horizontal neighbours
        const int wall_x = std::max(a.x, b.x);
        d = {wall_x, static_cast<int>(rng.uniform_int(a.y + 1, a.y + kRoomSize - 2))};
        front = {a.x < b.x ? wall_x - 1 : wall_x + 1, d.y};
        reserved.push_back({a.x < b.x ? wall_x + 1 : wall_x - 1, d.y});
      } else {
        const int wall_y = std::max(a.y, b.y);
        d = {static_cast<int>(rng.uniform_int(a.x + 1, a.x + kRoomSize - 2)), wall_y};
        front = {d.x, a.y < b.y ? wall_y - 1 : wall_y + 1};
        reserved.push_back({d.x, a.y < b.y ? wall_y + 1 : wall_y - 1});
      }
      reserved.push_back(front);
      door_pos.push_back(d);
      parent_side.push_back(front);
    }

    std::array<Color, 6> palette = kPalette;
    rng.shuffle(palette.begin(), palette.end());
    std::size_t next_lock_color = 0;
    std::vector<bool> door_locked(tree.size(), false);
    for (std::size_t e = 0; e < tree.size(); ++e) {
      const bool want = locked && (on_path[static_cast<std::size_t>(tree[e].second)] || rng.bernoulli(0.5));
      if (want && next_lock_color < palette.size()) {
        door_locked[e] = true;
        w.at(door_pos[e]) = Cell::door(palette[next_lock_color++], DoorState::locked);
      } else {
        w.at(door_pos[e]) = Cell::door(detail::random_color(rng), DoorState::closed);
      }
    }

    const auto start_cells = detail::free_cells(w, rooms[0], reserved);
    const Vec2 start = start_cells[rng.index(start_cells.size())];
    w.agent = AgentPose{start.x, start.y, detail::random_direction(rng)};
    reserved.push_back(start);

    bool ok = true;
    std::vector<int> accessible = {0};
    for (std::size_t e = 0; e < tree.size() && ok; ++e) {
      if (door_locked[e]) {
        const Color key_color = w.at(door_pos[e]).color;
        const int key_room = accessible[rng.index(accessible.size())];
        const auto cell = detail::pick_free(rng, w, rooms[static_cast<std::size_t>(key_room)], reserved);
        if (!cell) {
          ok = false;
          break;
        }
        w.at(*cell) = boxed_keys ? Cell::box(detail::random_color(rng), key_color) : Cell::key(key_color);
        if (blockers) {
          Color c = detail::random_color(rng);
          while (c == Color::blue) c = detail::random_color(rng);
          w.at(parent_side[e]) = Cell::ball(c);
        }
      }
      accessible.push_back(tree[e].second);
    }
    if (!ok) continue;
    const auto ball_cell = detail::pick_free(rng, w, rooms[static_cast<std::size_t>(ball_room)], reserved);
    if (!ball_cell) continue;
    w.at(*ball_cell) = Cell::ball(Color::blue);

    w.max_steps = 16 * grid_rooms * 64;
    w.rng_seed = seed;
    w.goal = GoalCondition::pickup(Kind::ball, Color::blue);
    w.task = TaskSpec::obstructed(grid_rooms, locked, boxed_keys, blockers);
    if (goal_reachable_relaxed(w)) return w;
  }
  throw GeneratorError("obstructed: no solvable layout after " + std::to_string(kGeneratorAttempts) + " attempts");
}

/// Fixed 14x14 sandbox: a key, a ball and a box in each corner. `seed` only
/// drives colors and the spawn direction.
inline GridWorld new_playground(std::uint64_t seed) {
  constexpr int kSize = 14;
  Rng rng(seed);
  GridWorld w(kSize, kSize);
  detail::carve(w, Rect{0, 0, kSize, kSize});
  struct Corner {
    Vec2 key, ball, box;
  };
  constexpr int lo = 1;
  constexpr int hi = kSize - 2;
  const std::array<Corner, 4> corners = {{
      {{lo, lo}, {lo + 1, lo}, {lo, lo + 1}},
      {{hi, lo}, {hi - 1, lo}, {hi, lo + 1}},
      {{lo, hi}, {lo + 1, hi}, {lo, hi - 1}},
      {{hi, hi}, {hi - 1, hi}, {hi, hi - 1}},
  }};
  for (const Corner& c : corners) {
    w.at(c.key) = Cell::key(detail::random_color(rng));
    w.at(c.ball) = Cell::ball(detail::random_color(rng));
    const Color box_color = detail::random_color(rng);
    w.at(c.box) = Cell::box(box_color, detail::random_color(rng));
  }
  w.agent = AgentPose{kSize / 2, kSize / 2, detail::random_direction(rng)};
  w.max_steps = 200;
  w.rng_seed = seed;
  w.goal = GoalCondition{};
  w.task = TaskSpec::playground();
  return w;
}

inline GridWorld new_ballpit(BallPitLevel level, std::uint64_t seed) {
  for (int attempt = 0; attempt < kGeneratorAttempts; ++attempt) {
    const std::uint64_t layout_seed = attempt == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(attempt));
    auto layout = detail::multiroom_layout(4, 6, layout_seed);
    GridWorld& w = layout.world;
    w.task = TaskSpec::ballpit(level);
    w.rng_seed = seed;
    if (level == BallPitLevel::no_ball) return w;

    // Keep the shortest route and both sides of every door clear.
    std::vector<Vec2> reserved = detail::route_to_goal(w);
    for (Vec2 d : layout.doors) detail::neighbours_of(d, reserved);

    Rng rng(derive_seed(seed, 0xBA11B17ULL + static_cast<std::uint64_t>(attempt)));
    const std::size_t wanted = level == BallPitLevel::small ? 1 : level == BallPitLevel::more ? 3 : 0;
    bool ok = true;
    for (const Rect& room : layout.rooms) {
      auto cells = detail::free_cells(w, room, reserved);
      if (cells.size() < wanted) {
        ok = false;
        break;
      }
      rng.shuffle(cells.begin(), cells.end());
      const std::size_t count = level == BallPitLevel::max ? cells.size() : wanted;
      for (std::size_t i = 0; i < count; ++i) {
        const Color c = detail::random_color(rng);
        switch (rng.uniform_int(0, 2)) {
          case 0: w.at(cells[i]) = Cell::ball(c); break;
          case 1: w.at(cells[i]) = Cell::key(c); break;
          default: w.at(cells[i]) = Cell::box(c); break;
        }
      }
    }
    if (ok) return w;
  }
  throw GeneratorError("ballpit: no layout with room for objects after " + std::to_string(kGeneratorAttempts) + " attempts");
}

namespace detail {

/// ColorMaze. Room grid (2 rows x 4 columns, 4x4 interiors):
///   row 0:  D  C1 C2 C3      D is a dead end; the agent starts in C1
///   row 1:  -  G  F  C4      F holds two boxes, G the blue ball behind a locked door
/// C1..C4 are joined by doorless openings and have colored floors.
inline GridWorld build_colormaze(std::uint64_t topology_seed, std::uint64_t episode_seed) {
  constexpr int kStep = 5;
  auto room = [](int r, int c) { return Rect{c * kStep, r * kStep, kStep + 1, kStep + 1}; };
  const Rect D = room(0, 0), C1 = room(0, 1), C2 = room(0, 2), C3 = room(0, 3);
  const Rect C4 = room(1, 3), F = room(1, 2), G = room(1, 1);

  Rng topo(topology_seed);
  auto along_y = [&](const Rect& r) { return static_cast<int>(topo.uniform_int(r.y + 1, r.y + r.h - 2)); };
  auto along_x = [&](const Rect& r) { return static_cast<int>(topo.uniform_int(r.x + 1, r.x + r.w - 2)); };
  const Vec2 open_d_c1{C1.x, along_y(C1)};
  const Vec2 open_c1_c2{C2.x, along_y(C2)};
  const Vec2 open_c2_c3{C3.x, along_y(C3)};
  const Vec2 open_c3_c4{along_x(C4), C4.y};
  const Vec2 open_c4_f{C4.x, along_y(C4)};
  const Vec2 locked_door{F.x, along_y(F)};

  std::vector<Vec2> reserved;
  for (Vec2 p : {open_d_c1, open_c1_c2, open_c2_c3, open_c3_c4, open_c4_f, locked_door}) neighbours_of(p, reserved);
  auto pick = [&](const Rect& r) {
    std::vector<Vec2> cells;
    for (Vec2 p : interior(r)) {
      if (std::find(reserved.begin(), reserved.end(), p) == reserved.end()) cells.push_back(p);
    }
    const Vec2 p = cells[topo.index(cells.size())];
    reserved.push_back(p);
    return p;
  };
  const Vec2 box_a = pick(F);
  const Vec2 box_b = pick(F);
  const Vec2 ball = pick(G);
  const Vec2 spawn = pick(C1);

  Rng ep(episode_seed);
  GridWorld w(4 * kStep + 1, 2 * kStep + 1);
  carve(w, D);
  for (const Rect& r : {C1, C2, C3, C4}) carve(w, r, random_color(ep));
  carve(w, F);
  carve(w, G);
  for (Vec2 p : {open_d_c1, open_c1_c2, open_c2_c3, open_c3_c4, open_c4_f}) w.at(p) = Cell::floor();
  const Color door_color = random_color(ep);
  w.at(locked_door) = Cell::door(door_color, DoorState::locked);
  const bool key_in_a = ep.bernoulli(0.5);
  w.at(box_a) = Cell::box(random_color(ep), key_in_a ? door_color : Color::none);
  w.at(box_b) = Cell::box(random_color(ep), key_in_a ? Color::none : door_color);
  w.at(ball) = Cell::ball(Color::blue);
  w.agent = AgentPose{spawn.x, spawn.y, random_direction(ep)};
  w.max_steps = 576;
  w.rng_seed = topology_seed;
  w.goal = GoalCondition::pickup(Kind::ball, Color::blue);
  w.task = TaskSpec::colormaze();
  return w;
}

}  // namespace detail

inline GridWorld new_colormaze(std::uint64_t seed) { return detail::build_colormaze(seed, seed); }

/// Builds a fresh instance of `task` from `seed`.
inline GridWorld make_world(const TaskSpec& task, std::uint64_t seed) {
  switch (task.family) {
    case Family::multiroom: return new_multiroom(task.n_rooms, task.max_size, seed);
    case Family::keycorridor: return new_keycorridor(task.room_size, task.rows, seed);
    case Family::obstructed: return new_obstructed_rooms(task.grid_rooms, task.locked, task.boxed_keys, task.blockers, seed);
    case Family::playground: return new_playground(seed);
    case Family::ballpit: return new_ballpit(task.level, seed);
    case Family::colormaze: return new_colormaze(seed);
  }
  throw ContractViolation("unknown task family");
}

/// Starts a new episode. Fixed-layout families (playground, colormaze) keep
/// their topology and redraw colors and spawn direction; procedural families
/// draw a whole new map from `episode_seed`.
inline Observation reset(GridWorld& w, std::uint64_t episode_seed) {
  switch (w.task.family) {
    case Family::playground: {
      const std::uint64_t topology = w.rng_seed;
      w = new_playground(episode_seed);
      w.rng_seed = topology;
      break;
    }
    case Family::colormaze: w = detail::build_colormaze(w.rng_seed, episode_seed); break;
    default: w = make_world(w.task, episode_seed); break;
  }
  return observe(w);
}

}  // namespace dowham::gridworld
