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

#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "bfs.hpp"
#include "dowham/gridworld/generators.hpp"
#include "dowham/gridworld/snapshot.hpp"
#include "dowham/gridworld/world.hpp"

namespace {

using namespace dowham;
using namespace dowham::gridworld;

int count_cells(const GridWorld& w, Kind k) {
  int n = 0;
  for (const Cell& c : w.cells) n += c.kind == k;
  return n;
}

int count_locked(const GridWorld& w) {
  int n = 0;
  for (const Cell& c : w.cells) n += c.kind == Kind::door && c.door_state == DoorState::locked;
  return n;
}

// Open square room with the agent in the middle facing north.
GridWorld open_room(int size = 14) {
  GridWorld w(size, size);
  detail::carve(w, Rect{0, 0, size, size});
  w.agent = AgentPose{size / 2, size / 2, Direction::north};
  w.max_steps = 100;
  return w;
}

std::vector<Action> pickup_and_navigation() {
  return {Action::turn_left, Action::turn_right, Action::move_forward, Action::pickup};
}

// ---------------------------------------------------------------- generators

TEST(MultiRoom, SevenRoomsOfSizeFourHaveTwoByTwoInteriors) {
  const auto layout = detail::multiroom_layout(7, 4, 42);
  ASSERT_EQ(layout.rooms.size(), 7u);
  for (const auto& r : layout.rooms) {
    EXPECT_EQ(r.w - 2, 2);
    EXPECT_EQ(r.h - 2, 2);
  }
  EXPECT_EQ(count_cells(layout.world, Kind::goal), 1);
  EXPECT_EQ(count_cells(layout.world, Kind::door), 6);
}

TEST(MultiRoom, TwoRoomsAreSolvable) {
  const auto w = new_multiroom(2, 4, 0);
  EXPECT_TRUE(oracle::bfs_solve(w, oracle::navigation_and_toggle()).solvable);
}

TEST(MultiRoom, RejectsSingleRoom) {
  EXPECT_THROW(new_multiroom(1, 4, 0), ContractViolation);
  EXPECT_THROW(new_multiroom(2, 3, 0), ContractViolation);
}

TEST(MultiRoom, InteriorSizesStayInRange) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto layout = detail::multiroom_layout(4, 6, seed);
    for (const auto& r : layout.rooms) {
      EXPECT_GE(r.w - 2, 2);
      EXPECT_LE(r.w - 2, 4);
      EXPECT_GE(r.h - 2, 2);
      EXPECT_LE(r.h - 2, 4);
    }
    EXPECT_EQ(layout.world.max_steps, 20 * 4 * 6);
  }
}

TEST(KeyCorridor, OneLockedRoomWithGreenBall) {
  const auto w = new_keycorridor(4, 3, 7);
  EXPECT_EQ(count_locked(w), 1);
  EXPECT_EQ(w.goal, GoalCondition::pickup(Kind::ball, Color::green));
  int green_balls = 0;
  for (const Cell& c : w.cells) green_balls += c.kind == Kind::ball && c.color == Color::green;
  EXPECT_EQ(green_balls, 1);
  // 2 x rows side rooms hang off the corridor, each behind one door.
  EXPECT_EQ(count_cells(w, Kind::door), 6);
  EXPECT_EQ(w.max_steps, 30 * 4 * 3);
}

TEST(KeyCorridor, MatchingKeyExistsAndMapIsSolvable) {
  const auto w = new_keycorridor(3, 1, 1);
  Color lock = Color::none;
  for (const Cell& c : w.cells) {
    if (c.kind == Kind::door && c.door_state == DoorState::locked) lock = c.color;
  }
  ASSERT_NE(lock, Color::none);
  int keys = 0;
  for (const Cell& c : w.cells) keys += c.kind == Kind::key && c.color == lock;
  EXPECT_EQ(keys, 1);
  EXPECT_TRUE(oracle::bfs_solve(w, oracle::all_actions_but_done()).solvable);
}

TEST(KeyCorridor, RejectsTinyRooms) { EXPECT_THROW(new_keycorridor(2, 1, 1), ContractViolation); }

TEST(Obstructed, LockedLayoutHasKeyAndBlueBall) {
  const auto w = new_obstructed_rooms(2, true, false, false, 3);
  EXPECT_GE(count_locked(w), 1);
  EXPECT_EQ(w.goal, GoalCondition::pickup(Kind::ball, Color::blue));
  EXPECT_GE(count_cells(w, Kind::key), 1);
  EXPECT_TRUE(oracle::bfs_solve(w, oracle::all_actions_but_done()).solvable);
}

TEST(Obstructed, BoxesAndBlockers) {
  const auto w = new_obstructed_rooms(2, true, true, true, 3);
  EXPECT_GE(count_cells(w, Kind::box), 1);
  EXPECT_EQ(count_cells(w, Kind::key), 0);  // every key is hidden
  int blockers = 0;
  for (const Cell& c : w.cells) blockers += c.kind == Kind::ball && c.color != Color::blue;
  EXPECT_GE(blockers, 1);
  EXPECT_TRUE(oracle::bfs_solve(w, oracle::all_actions_but_done()).solvable);
}

TEST(Obstructed, SingleOpenRoomSolvableByPickupAlone) {
  const auto w = new_obstructed_rooms(1, false, false, false, 5);
  EXPECT_EQ(count_locked(w), 0);
  EXPECT_TRUE(oracle::bfs_solve(w, pickup_and_navigation()).solvable);
}

TEST(Obstructed, FlagsNeedLockedLayout) {
  EXPECT_THROW(new_obstructed_rooms(2, false, true, false, 1), ContractViolation);
  EXPECT_THROW(new_obstructed_rooms(0, true, false, false, 1), ContractViolation);
  EXPECT_THROW(new_obstructed_rooms(10, true, false, false, 1), ContractViolation);
}

TEST(Playground, CenterSpawnAndEpisodeLimit) {
  const auto w = new_playground(1);
  EXPECT_EQ(w.width, 14);
  EXPECT_EQ(w.height, 14);
  EXPECT_EQ(w.agent.x, 7);
  EXPECT_EQ(w.agent.y, 7);
  EXPECT_EQ(w.max_steps, 200);
  EXPECT_EQ(w.goal.type, GoalCondition::Type::none);
}

TEST(Playground, SameSeedSameWorld) {
  EXPECT_EQ(canonical_hash(new_playground(1)), canonical_hash(new_playground(1)));
}

TEST(Playground, SeedsShareObjectPositions) {
  const auto a = new_playground(1);
  const auto b = new_playground(2);
  bool colors_differ = false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].kind, b.cells[i].kind);
    colors_differ |= a.cells[i].color != b.cells[i].color;
  }
  EXPECT_TRUE(colors_differ);
}

TEST(BallPit, NoBallEqualsMultiRoom) {
  const auto a = new_ballpit(BallPitLevel::no_ball, 9);
  const auto b = new_multiroom(4, 6, 9);
  EXPECT_EQ(a.cells, b.cells);
  EXPECT_EQ(a.agent, b.agent);
}

TEST(BallPit, SmallLevelHasOneObjectPerRoom) {
  const auto w = new_ballpit(BallPitLevel::small, 9);
  const auto layout = detail::multiroom_layout(4, 6, 9);
  ASSERT_EQ(layout.rooms.size(), 4u);
  for (const auto& r : layout.rooms) {
    int objects = 0;
    for (Vec2 p : detail::interior(r)) {
      const Kind k = w.at(p).kind;
      objects += k == Kind::ball || k == Kind::key || k == Kind::box;
    }
    EXPECT_EQ(objects, 1);
  }
}

TEST(BallPit, MaxLevelStaysSolvable) {
  const auto w = new_ballpit(BallPitLevel::max, 9);
  EXPECT_GT(count_cells(w, Kind::ball) + count_cells(w, Kind::key) + count_cells(w, Kind::box), 8);
  EXPECT_TRUE(oracle::bfs_solve(w, oracle::navigation_and_toggle()).solvable);
}

TEST(ColorMaze, LimitAndBoxes) {
  const auto w = new_colormaze(4);
  EXPECT_EQ(w.max_steps, 576);
  EXPECT_EQ(count_cells(w, Kind::box), 2);
  int hiding = 0;
  for (const Cell& c : w.cells) hiding += c.kind == Kind::box && c.hidden != Color::none;
  EXPECT_EQ(hiding, 1);
  EXPECT_EQ(count_locked(w), 1);
  EXPECT_TRUE(oracle::bfs_solve(w, oracle::all_actions_but_done()).solvable);
}

TEST(ColorMaze, ResetKeepsTopologyAndRecolorsFloors) {
  auto a = new_colormaze(4);
  auto b = a;
  reset(a, 100);
  reset(b, 200);
  bool floor_colors_differ = false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].kind, b.cells[i].kind);
    if (a.cells[i].kind == Kind::floor) floor_colors_differ |= a.cells[i].color != b.cells[i].color;
  }
  EXPECT_TRUE(floor_colors_differ);
  EXPECT_EQ(a.agent.pos(), b.agent.pos());
}

TEST(Reset, PlaygroundKeepsPositions) {
  auto w = new_playground(3);
  const auto before = w;
  step(w, Action::move_forward);
  reset(w, 77);
  EXPECT_EQ(w.step_count, 0);
  for (std::size_t i = 0; i < w.cells.size(); ++i) EXPECT_EQ(w.cells[i].kind, before.cells[i].kind);
  EXPECT_EQ(w.agent.pos(), before.agent.pos());
}

TEST(Reset, MultiRoomDrawsNewLayout) {
  auto w = new_multiroom(3, 5, 1);
  const auto h = canonical_hash(w);
  step(w, Action::turn_left);
  reset(w, 2);
  EXPECT_EQ(w.step_count, 0);
  EXPECT_NE(canonical_hash(w), h);
  EXPECT_EQ(canonical_hash(w), canonical_hash(new_multiroom(3, 5, 2)));
}

TEST(Generators, DeterministicPerSeed) {
  for (const char* spec : {"multiroom:3,5", "keycorridor:3,2", "obstructed:2,lhb", "ballpit:more", "colormaze"}) {
    const auto task = parse_task(spec);
    EXPECT_EQ(to_snapshot(make_world(task, 11)), to_snapshot(make_world(task, 11))) << spec;
  }
}

TEST(Task, ParseRoundTripAndErrors) {
  for (const char* spec : {"multiroom:2,4", "keycorridor:3,2", "obstructed:2,lhb", "ballpit:max", "playground", "colormaze"}) {
    EXPECT_EQ(to_string(parse_task(spec)), spec);
  }
  EXPECT_THROW(parse_task("multiroom:2"), ConfigError);
  EXPECT_THROW(parse_task("mazes"), ConfigError);
  EXPECT_THROW(parse_task("obstructed:2,x"), ConfigError);
  EXPECT_THROW(parse_task("ballpit:huge"), ConfigError);
}

// ------------------------------------------------------------------- step

TEST(Step, ForwardIntoWallChangesNothing) {
  auto w = open_room();
  w.agent = AgentPose{1, 1, Direction::north};
  const auto h = canonical_hash(w);
  const auto r = step(w, Action::move_forward);
  EXPECT_EQ(w.agent.pos(), (Vec2{1, 1}));
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_EQ(canonical_hash(w), h);
}

TEST(Step, PickupOnEmptyFloorChangesNothing) {
  auto w = open_room();
  const auto h = canonical_hash(w);
  step(w, Action::pickup);
  EXPECT_EQ(canonical_hash(w), h);
  EXPECT_FALSE(w.inventory);
}

TEST(Step, MatchingKeyUnlocksAndIsRetained) {
  auto w = open_room();
  w.at(7, 6) = Cell::door(Color::blue, DoorState::locked);
  w.inventory = Item{Kind::key, Color::red};
  step(w, Action::toggle);
  EXPECT_EQ(w.at(7, 6).door_state, DoorState::locked);
  w.inventory = Item{Kind::key, Color::blue};
  step(w, Action::toggle);
  EXPECT_EQ(w.at(7, 6).door_state, DoorState::open);
  ASSERT_TRUE(w.inventory);
  EXPECT_EQ(*w.inventory, (Item{Kind::key, Color::blue}));
  step(w, Action::toggle);
  EXPECT_EQ(w.at(7, 6).door_state, DoorState::closed);
}

TEST(Step, ToggleBoxRevealsContentInPlace) {
  auto w = open_room();
  w.at(7, 6) = Cell::box(Color::yellow, Color::purple);
  w.at(8, 7) = Cell::box(Color::yellow);
  step(w, Action::toggle);
  EXPECT_EQ(w.at(7, 6), Cell::key(Color::purple));
  step(w, Action::turn_right);
  step(w, Action::toggle);
  EXPECT_EQ(w.at(8, 7), Cell::floor());
}

TEST(Step, PickupAndDropRespectInventoryAndFloor) {
  auto w = open_room();
  w.at(7, 6) = Cell::ball(Color::red);
  w.at(6, 7) = Cell::key(Color::green);
  step(w, Action::pickup);
  EXPECT_EQ(w.inventory, (Item{Kind::ball, Color::red}));
  step(w, Action::turn_left);
  step(w, Action::pickup);  // hands full
  EXPECT_EQ(w.at(6, 7), Cell::key(Color::green));
  step(w, Action::drop);  // faced cell occupied
  EXPECT_TRUE(w.inventory);
  step(w, Action::turn_right);
  w.at(7, 6) = Cell::goal();
  step(w, Action::drop);  // goal tiles are off limits
  EXPECT_TRUE(w.inventory);
  w.at(7, 6) = Cell::floor(Color::red);
  step(w, Action::drop);  // colored floor too
  EXPECT_TRUE(w.inventory);
  w.at(7, 6) = Cell::floor();
  step(w, Action::drop);
  EXPECT_FALSE(w.inventory);
  EXPECT_EQ(w.at(7, 6), Cell::ball(Color::red));
}

TEST(Step, GoalRewardAndTermination) {
  auto w = open_room();
  w.goal = GoalCondition::reach_tile();
  w.at(7, 5) = Cell::goal();
  w.max_steps = 10;
  auto r = step(w, Action::move_forward);
  EXPECT_FALSE(r.done);
  EXPECT_EQ(r.reward, 0.0);
  r = step(w, Action::move_forward);
  EXPECT_TRUE(r.done);
  EXPECT_DOUBLE_EQ(r.reward, 1.0 - 0.9 * 1.0 / 10.0);
  EXPECT_THROW(step(w, Action::done), ContractViolation);
}

TEST(Step, TimeLimitEndsEpisode) {
  auto w = open_room();
  w.max_steps = 3;
  EXPECT_FALSE(step(w, Action::done).done);
  EXPECT_FALSE(step(w, Action::done).done);
  const auto r = step(w, Action::done);
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_THROW(step(w, Action::done), ContractViolation);
}

TEST(Step, PickupGoalObjectSucceeds) {
  auto w = open_room();
  w.goal = GoalCondition::pickup(Kind::ball, Color::blue);
  w.at(7, 6) = Cell::ball(Color::blue);
  const auto r = step(w, Action::pickup);
  EXPECT_TRUE(r.done);
  EXPECT_DOUBLE_EQ(r.reward, 1.0);
}

// ------------------------------------------------------------ observation

TEST(Observe, WallAheadHidesEverythingBeyond) {
  auto w = open_room();
  for (int x = 0; x < w.width; ++x) w.at(x, 6) = Cell::wall();
  const auto obs = observe(w);
  for (int row = 0; row < 5; ++row) {
    for (int col = 0; col < 7; ++col) EXPECT_EQ(obs.at(row, col).kind, Kind::unseen) << row << "," << col;
  }
  for (int col = 0; col < 7; ++col) EXPECT_EQ(obs.at(5, col).kind, Kind::wall);
}

TEST(Observe, OpenRoomCenterSeesAll) {
  const auto obs = observe(open_room());
  for (const auto& v : obs.view) EXPECT_EQ(v.kind, Kind::floor);
}

TEST(Observe, CarriedItemAndAgentCell) {
  auto w = open_room();
  w.inventory = Item{Kind::key, Color::red};
  w.at(7, 6) = Cell::ball(Color::green);
  const auto obs = observe(w);
  EXPECT_EQ(obs.carried, (Item{Kind::key, Color::red}));
  EXPECT_EQ(obs.at(5, 3).kind, Kind::ball);
  EXPECT_EQ(obs.at(6, 3).kind, Kind::floor);
}

TEST(Observe, ViewRotatesWithAgent) {
  auto w = open_room();
  w.at(8, 7) = Cell::ball(Color::green);
  EXPECT_EQ(observe(w).at(6, 4).kind, Kind::ball);  // to the right when facing north
  w.agent.dir = Direction::east;
  EXPECT_EQ(observe(w).at(5, 3).kind, Kind::ball);  // straight ahead
}

TEST(Observe, ClosedDoorOccludes) {
  auto w = open_room();
  for (int x = 0; x < w.width; ++x) w.at(x, 5) = Cell::wall();
  w.at(7, 5) = Cell::door(Color::red, DoorState::closed);
  EXPECT_EQ(observe(w).at(3, 3).kind, Kind::unseen);
  w.at(7, 5).door_state = DoorState::open;
  EXPECT_EQ(observe(w).at(3, 3).kind, Kind::floor);
}

// ------------------------------------------------------------------- hash

TEST(Hash, CopyTurnAndIneffectiveAction) {
  auto w = new_keycorridor(3, 2, 5);
  const auto copy = w;
  EXPECT_EQ(canonical_hash(w), canonical_hash(copy));
  step(w, Action::turn_left);
  EXPECT_NE(canonical_hash(w), canonical_hash(copy));
  step(w, Action::turn_right);
  EXPECT_EQ(canonical_hash(w), canonical_hash(copy));
}

TEST(Hash, ExcludesStepCounterAndSeed) {
  auto w = open_room();
  const auto h = canonical_hash(w);
  w.step_count = 5;
  w.rng_seed = 99;
  EXPECT_EQ(canonical_hash(w), h);
}

TEST(Hash, SingleFieldChangesAreDetected) {
  const auto base = open_room();
  const auto h = canonical_hash(base);
  std::set<std::uint64_t> seen{h.value};
  auto w = base;
  w.at(3, 3) = Cell::floor(Color::grey);
  seen.insert(canonical_hash(w).value);
  w = base;
  w.at(3, 3) = Cell::box(Color::red, Color::blue);
  seen.insert(canonical_hash(w).value);
  w = base;
  w.at(3, 3) = Cell::box(Color::red);
  seen.insert(canonical_hash(w).value);
  w = base;
  w.inventory = Item{Kind::ball, Color::red};
  seen.insert(canonical_hash(w).value);
  w = base;
  w.agent.x += 1;
  seen.insert(canonical_hash(w).value);
  EXPECT_EQ(seen.size(), 6u);
}

TEST(Hash, LocalViewIgnoresAbsolutePosition) {
  auto a = open_room();
  auto b = open_room();
  b.agent.x -= 2;
  EXPECT_NE(canonical_hash(a), canonical_hash(b));
  EXPECT_EQ(local_view_hash(a), local_view_hash(b));
  b.inventory = Item{Kind::key, Color::red};
  EXPECT_NE(local_view_hash(a), local_view_hash(b));
  EXPECT_THROW(local_view_hash(a, 0), ContractViolation);
}

// --------------------------------------------------------------- snapshot

TEST(Snapshot, RoundTripPreservesState) {
  for (const char* spec : {"keycorridor:3,2", "obstructed:2,lhb", "colormaze", "playground"}) {
    auto w = make_world(parse_task(spec), 3);
    step(w, Action::move_forward);
    const auto text = to_snapshot(w);
    const auto back = parse_snapshot(text);
    EXPECT_EQ(canonical_hash(back), canonical_hash(w)) << spec;
    EXPECT_EQ(to_snapshot(back), text) << spec;
    EXPECT_EQ(back.step_count, w.step_count);
    EXPECT_EQ(back.max_steps, w.max_steps);
    EXPECT_EQ(back.goal, w.goal);
  }
}

TEST(Snapshot, RejectsGarbage) {
  EXPECT_ANY_THROW(parse_snapshot("not a map"));
  EXPECT_ANY_THROW(parse_snapshot("dowham-map v9\n"));
}

// --------------------------------------------------------------- properties

TEST(Properties, RandomRolloutsKeepInvariants) {
  for (const char* spec : {"multiroom:3,5", "keycorridor:3,2", "obstructed:2,lhb", "playground", "ballpit:max", "colormaze"}) {
    const auto task = parse_task(spec);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto w = make_world(task, seed);
      Rng rng(seed);
      for (int i = 0; i < 400 && !w.terminated(); ++i) {
        const auto before = w;
        const Action a = static_cast<Action>(rng.index(kNumActions));
        const auto r = step(w, a);
        ASSERT_TRUE(w.at(w.agent.pos()).walkable()) << spec;
        ASSERT_LE(w.step_count, w.max_steps);
        if (w.goal_reached) {
          ASSERT_GT(r.reward, 0.1);
          ASSERT_LE(r.reward, 1.0);
        } else {
          ASSERT_EQ(r.reward, 0.0);
        }
        for (int x = 0; x < w.width; ++x) {
          ASSERT_EQ(w.at(x, 0).kind, Kind::wall);
          ASSERT_EQ(w.at(x, w.height - 1).kind, Kind::wall);
        }
        // Locked doors open only through toggle with the matching key.
        for (std::size_t c = 0; c < w.cells.size(); ++c) {
          if (before.cells[c].kind == Kind::door && before.cells[c].door_state == DoorState::locked &&
              w.cells[c].door_state != DoorState::locked) {
            ASSERT_EQ(a, Action::toggle);
            ASSERT_TRUE(before.inventory && before.inventory->kind == Kind::key &&
                        before.inventory->color == before.cells[c].color);
          }
        }
        if (a == Action::done) ASSERT_EQ(canonical_hash(w), canonical_hash(before));
      }
    }
  }
}

TEST(Properties, IdenticalActionSequencesReplayIdentically) {
  const auto task = parse_task("keycorridor:3,2");
  auto run = [&] {
    auto w = make_world(task, 21);
    Rng rng(4);
    std::vector<std::uint64_t> trace;
    while (!w.terminated()) {
      const auto r = step(w, static_cast<Action>(rng.index(kNumActions)));
      trace.push_back(canonical_hash(w).value ^ observation_hash(r.observation));
    }
    return trace;
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
