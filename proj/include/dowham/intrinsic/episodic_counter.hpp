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
#include <unordered_map>

#include "dowham/gridworld/world.hpp"

namespace dowham::intrinsic {

using gridworld::StateHash;

struct StateHashHasher {
  std::size_t operator()(StateHash h) const noexcept { return static_cast<std::size_t>(h.value); }
};

/// Per-episode state visit counts N(s), cleared at every episode start.
class EpisodicStateCounter {
 public:
  /// Records one visit to `s` and returns the updated count.
  std::uint32_t visit(StateHash s) {
    ++total_;
    return ++counts_[s];
  }

  std::uint32_t count(StateHash s) const {
    const auto it = counts_.find(s);
    return it == counts_.end() ? 0 : it->second;
  }

  void reset() {
    counts_.clear();
    total_ = 0;
    ++episode_id_;
  }

  bool empty() const { return counts_.empty(); }
  std::uint64_t total_visits() const { return total_; }
  std::uint64_t episode_id() const { return episode_id_; }
  std::size_t distinct_states() const { return counts_.size(); }

 private:
  std::unordered_map<StateHash, std::uint32_t, StateHashHasher> counts_;
  std::uint64_t total_ = 0;
  std::uint64_t episode_id_ = 0;
};

}  // namespace dowham::intrinsic
