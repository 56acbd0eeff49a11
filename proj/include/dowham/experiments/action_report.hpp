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
#include <ostream>
#include <vector>

#include "dowham/errors.hpp"
#include "dowham/gridworld/types.hpp"
#include "dowham/hash.hpp"
#include "dowham/intrinsic/action_stats.hpp"

namespace dowham::experiments {

using gridworld::kNumActions;

/// Per-action usage / effective-use totals and their normalized shares.
struct ActionDistributionReport {
  std::array<std::uint64_t, kNumActions> usage{};
  std::array<std::uint64_t, kNumActions> effective{};
  std::array<double, kNumActions> usage_share{};
  std::array<double, kNumActions> effective_share{};

  std::uint64_t total_usage() const {
    std::uint64_t s = 0;
    for (auto u : usage) s += u;
    return s;
  }
  std::uint64_t total_effective() const {
    std::uint64_t s = 0;
    for (auto e : effective) s += e;
    return s;
  }
};

inline ActionDistributionReport make_action_report(const intrinsic::ActionStats& stats) {
  ActionDistributionReport r;
  r.usage = stats.usage;
  r.effective = stats.effective;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    if (r.effective[a] > r.usage[a]) throw ContractViolation("action report: effective uses exceed uses");
  }
  const double tu = static_cast<double>(r.total_usage());
  const double te = static_cast<double>(r.total_effective());
  for (std::size_t a = 0; a < kNumActions; ++a) {
    r.usage_share[a] = tu > 0.0 ? static_cast<double>(r.usage[a]) / tu : 0.0;
    r.effective_share[a] = te > 0.0 ? static_cast<double>(r.effective[a]) / te : 0.0;
  }
  return r;
}

/// Merges per-seed counters into one report.
inline ActionDistributionReport merge_action_reports(const std::vector<ActionDistributionReport>& reports) {
  intrinsic::ActionStats total;
  for (const auto& r : reports) {
    for (std::size_t a = 0; a < kNumActions; ++a) {
      total.usage[a] += r.usage[a];
      total.effective[a] += r.effective[a];
    }
  }
  return make_action_report(total);
}

inline void write_actions_csv(std::ostream& os, const ActionDistributionReport& r) {
  os << "action,usage,effective,usage_share,effective_share\n";
  for (std::size_t a = 0; a < kNumActions; ++a) {
    os << gridworld::to_string(static_cast<gridworld::Action>(a)) << ',' << r.usage[a] << ',' << r.effective[a] << ','
       << format_double(r.usage_share[a]) << ',' << format_double(r.effective_share[a]) << '\n';
  }
}

}  // namespace dowham::experiments
