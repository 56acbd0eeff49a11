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
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "dowham/errors.hpp"
#include "dowham/gridworld/types.hpp"
#include "dowham/rng.hpp"

namespace dowham::agent {

using gridworld::Action;
using gridworld::kNumActions;

using ActionValues = std::array<double, kNumActions>;

/// Tabular action values keyed by a 64-bit state key; missing entries read as `initial_value`.
class QTable {
 public:
  QTable() = default;
  explicit QTable(double initial_value) {
    if (!std::isfinite(initial_value)) throw ContractViolation("QTable: non-finite initial value");
    initial_.fill(initial_value);
  }

  const ActionValues& values(std::uint64_t key) const {
    const auto it = table_.find(key);
    return it == table_.end() ? initial_ : it->second;
  }
  ActionValues& mutable_values(std::uint64_t key) { return table_.try_emplace(key, initial_).first->second; }
  double initial_value() const { return initial_[0]; }

  double get(std::uint64_t key, Action a) const { return values(key)[static_cast<std::size_t>(a)]; }
  void set(std::uint64_t key, Action a, double v) { mutable_values(key)[static_cast<std::size_t>(a)] = v; }

  double max_value(std::uint64_t key) const {
    const auto& v = values(key);
    double m = v[0];
    for (double x : v) m = std::max(m, x);
    return m;
  }

  std::size_t size() const { return table_.size(); }
  const std::unordered_map<std::uint64_t, ActionValues>& table() const { return table_; }

 private:
  ActionValues initial_{};
  std::unordered_map<std::uint64_t, ActionValues> table_;
};

/// Argmax with ties broken towards the lowest action id.
inline Action greedy_action(const QTable& q, std::uint64_t key) {
  const auto& v = q.values(key);
  std::size_t best = 0;
  for (std::size_t a = 1; a < kNumActions; ++a) {
    if (v[a] > v[best]) best = a;
  }
  return static_cast<Action>(best);
}

/// Epsilon-greedy. Always consumes one uniform draw, plus one more when exploring.
inline Action select_action(const QTable& q, std::uint64_t key, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ContractViolation("select_action: epsilon must be in [0, 1]");
  if (rng.uniform01() < epsilon) return static_cast<Action>(rng.index(kNumActions));
  return greedy_action(q, key);
}

struct QUpdateParams {
  double alpha = 0.1;
  double gamma = 0.99;
};

/// One-step Q-learning: Q(s,a) += alpha * (r + gamma * max Q(s') * (1 - terminal) - Q(s,a)).
inline void q_update(QTable& q, std::uint64_t key, Action a, double reward, std::uint64_t next_key, bool terminal,
                     QUpdateParams p) {
  if (!std::isfinite(reward)) throw ContractViolation("q_update: non-finite reward");
  if (!(p.alpha > 0.0) || !(p.gamma > 0.0 && p.gamma <= 1.0)) throw ContractViolation("q_update: bad alpha/gamma");
  const double bootstrap = terminal ? 0.0 : p.gamma * q.max_value(next_key);
  auto& v = q.mutable_values(key)[static_cast<std::size_t>(a)];
  v += p.alpha * (reward + bootstrap - v);
}

}  // namespace dowham::agent
