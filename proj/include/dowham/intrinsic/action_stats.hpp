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
#include <string>
#include <vector>

#include "dowham/errors.hpp"
#include "dowham/gridworld/types.hpp"

namespace dowham::intrinsic {

using gridworld::Action;
using gridworld::kNumActions;

/// Lifetime per-action counters: how often each action was used and how
/// often it changed the state. Never reset between episodes.
struct ActionStats {
  std::array<std::uint64_t, kNumActions> usage{};
  std::array<std::uint64_t, kNumActions> effective{};

  void record(Action a, bool was_effective) {
    const auto i = static_cast<std::size_t>(a);
    ++usage[i];
    if (was_effective) ++effective[i];
  }

  std::uint64_t used(Action a) const { return usage[static_cast<std::size_t>(a)]; }
  std::uint64_t effective_uses(Action a) const { return effective[static_cast<std::size_t>(a)]; }

  friend bool operator==(const ActionStats&, const ActionStats&) = default;
};

inline void check_eta(double eta) {
  if (!(eta > 1.0) || !std::isfinite(eta)) {
    throw ConfigError("eta must be a finite value > 1 (got " + std::to_string(eta) + ")");
  }
}

/// Bonus as a function of the effectiveness ratio E/U:
/// (eta^(1 - ratio) - 1) / (eta - 1). Equals 1 at ratio 0 and 0 at ratio 1.
inline double bonus_from_ratio(double ratio, double eta) {
  check_eta(eta);
  return (std::pow(eta, 1.0 - ratio) - 1.0) / (eta - 1.0);
}

/// Bonus for `a` given the lifetime counters. Requires at least one recorded use.
inline double bonus(const ActionStats& stats, Action a, double eta) {
  check_eta(eta);
  const auto u = stats.used(a);
  if (u == 0) throw ContractViolation("bonus: action has never been used");
  const double ratio = static_cast<double>(stats.effective_uses(a)) / static_cast<double>(u);
  return (std::pow(eta, 1.0 - ratio) - 1.0) / (eta - 1.0);
}

struct BonusCurveRow {
  double eta = 0.0;
  double ratio = 0.0;
  double bonus = 0.0;
};

/// Samples the bonus at `resolution` evenly spaced ratios in [0, 1] for each eta.
inline std::vector<BonusCurveRow> bonus_curve(const std::vector<double>& etas, int resolution) {
  if (resolution < 2) throw ConfigError("bonus curve resolution must be >= 2");
  std::vector<BonusCurveRow> rows;
  rows.reserve(etas.size() * static_cast<std::size_t>(resolution));
  for (double eta : etas) {
    check_eta(eta);
    for (int i = 0; i < resolution; ++i) {
      const double ratio = static_cast<double>(i) / static_cast<double>(resolution - 1);
      rows.push_back({eta, ratio, bonus_from_ratio(ratio, eta)});
    }
  }
  return rows;
}

}  // namespace dowham::intrinsic
