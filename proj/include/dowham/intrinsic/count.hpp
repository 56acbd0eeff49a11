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

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "dowham/gridworld/types.hpp"
#include "dowham/gridworld/world.hpp"

namespace dowham::intrinsic {

struct StateAction {
  gridworld::StateHash state;
  gridworld::Action action = gridworld::Action::turn_left;
  friend constexpr bool operator==(const StateAction&, const StateAction&) = default;
};

struct StateActionHasher {
  std::size_t operator()(const StateAction& k) const noexcept {
    return static_cast<std::size_t>(k.state.value ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(k.action) + 1)));
  }
};

/// Lifetime visit counts of (state, action) pairs.
class StateActionCounter {
 public:
  std::uint64_t increment(gridworld::StateHash s, gridworld::Action a) { return ++counts_[{s, a}]; }
  std::uint64_t count(gridworld::StateHash s, gridworld::Action a) const {
    const auto it = counts_.find({s, a});
    return it == counts_.end() ? 0 : it->second;
  }
  std::size_t size() const { return counts_.size(); }
  const std::unordered_map<StateAction, std::uint64_t, StateActionHasher>& table() const { return counts_; }
  void set(gridworld::StateHash s, gridworld::Action a, std::uint64_t n) { counts_[{s, a}] = n; }

 private:
  std::unordered_map<StateAction, std::uint64_t, StateActionHasher> counts_;
};

/// COUNT baseline: 1 / sqrt(n(s, a)) with n including this visit.
inline double count_reward(StateActionCounter& counter, gridworld::StateHash s, gridworld::Action a) {
  const auto n = counter.increment(s, a);
  return 1.0 / std::sqrt(static_cast<double>(n));
}

}  // namespace dowham::intrinsic
