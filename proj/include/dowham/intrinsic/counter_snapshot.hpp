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
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dowham/errors.hpp"
#include "dowham/hash.hpp"
#include "dowham/intrinsic/reward_engine.hpp"

namespace dowham::intrinsic {

// Counter snapshot, for audit and resume:
//
//   dowham-counters v1
//   engine dowham
//   usage <7 counts>
//   effective <7 counts>
//   state_action <n>
//   <state hex> <action id> <count>     (n lines, sorted)
//   end

struct CounterSnapshot {
  EngineKind engine = EngineKind::none;
  ActionStats stats;
  StateActionCounter state_action;
};

inline void write_counter_snapshot(std::ostream& os, EngineKind engine, const ActionStats& stats,
                                   const StateActionCounter& sa) {
  os << "dowham-counters v1\n";
  os << "engine " << to_string(engine) << "\n";
  os << "usage";
  for (auto u : stats.usage) os << ' ' << u;
  os << "\neffective";
  for (auto e : stats.effective) os << ' ' << e;
  os << "\n";
  std::vector<std::pair<StateAction, std::uint64_t>> rows(sa.table().begin(), sa.table().end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.first.state.value != b.first.state.value ? a.first.state.value < b.first.state.value
                                                      : a.first.action < b.first.action;
  });
  os << "state_action " << rows.size() << "\n";
  for (const auto& [key, n] : rows) {
    os << to_hex(key.state.value) << ' ' << static_cast<int>(key.action) << ' ' << n << "\n";
  }
  os << "end\n";
}

inline void write_counter_snapshot(std::ostream& os, const RewardEngine& engine) {
  write_counter_snapshot(os, engine.kind(), engine.action_stats(), engine.state_action_counts());
}

inline CounterSnapshot read_counter_snapshot(std::istream& is) {
  CounterSnapshot snap;
  std::string line;
  auto fail = [](const std::string& why) -> CounterSnapshot { throw IoError("counter snapshot: " + why); };
  if (!std::getline(is, line) || line != "dowham-counters v1") return fail("missing header");
  std::string word;
  if (!std::getline(is, line)) return fail("truncated");
  {
    std::istringstream ls(line);
    std::string engine;
    ls >> word >> engine;
    if (word != "engine") return fail("expected engine line");
    snap.engine = parse_engine_kind(engine);
  }
  for (auto* arr : {&snap.stats.usage, &snap.stats.effective}) {
    if (!std::getline(is, line)) return fail("truncated");
    std::istringstream ls(line);
    ls >> word;
    for (auto& v : *arr) ls >> v;
    if (!ls) return fail("bad counter line '" + line + "'");
  }
  for (std::size_t a = 0; a < kNumActions; ++a) {
    if (snap.stats.effective[a] > snap.stats.usage[a]) return fail("effective count exceeds usage");
  }
  std::size_t n = 0;
  if (!std::getline(is, line)) return fail("truncated");
  {
    std::istringstream ls(line);
    ls >> word >> n;
    if (word != "state_action" || !ls) return fail("expected state_action line");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(is, line)) return fail("truncated state_action table");
    std::istringstream ls(line);
    std::string hex;
    int action = 0;
    std::uint64_t count = 0;
    std::uint64_t state = 0;
    ls >> hex >> action >> count;
    if (!ls || !parse_hex(hex, state) || action < 0 || action >= static_cast<int>(kNumActions)) {
      return fail("bad state_action row '" + line + "'");
    }
    snap.state_action.set({state}, static_cast<Action>(action), count);
  }
  if (!std::getline(is, line) || line != "end") return fail("missing end");
  return snap;
}

}  // namespace dowham::intrinsic
