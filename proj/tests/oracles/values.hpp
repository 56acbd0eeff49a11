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

// Reference values computed independently of the library code.

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace dowham::oracle {

using BigFloat = boost::multiprecision::cpp_dec_float_100;

/// (eta^(1 - E/U) - 1) / (eta - 1) evaluated with 100 decimal digits.
inline double bonus_exact(double eta, std::uint64_t effective, std::uint64_t uses) {
  const BigFloat e(eta);
  const BigFloat ratio = BigFloat(effective) / BigFloat(uses);
  const BigFloat b = (boost::multiprecision::pow(e, BigFloat(1) - ratio) - 1) / (e - 1);
  return b.convert_to<double>();
}

/// Same as bonus_exact for a ratio given as i / (n - 1).
inline double bonus_exact_grid(double eta, int i, int n) {
  const BigFloat e(eta);
  const BigFloat ratio = BigFloat(i) / BigFloat(n - 1);
  const BigFloat b = (boost::multiprecision::pow(e, BigFloat(1) - ratio) - 1) / (e - 1);
  return b.convert_to<double>();
}

/// Two-state chain: from s0 action 0 stays (reward r_stay), action 1 moves to
/// s1 (reward 0); from s1 any action ends the episode with reward r_goal.
/// Returns optimal Q by value iteration: q[s][a].
inline std::array<std::array<double, 2>, 2> chain_values(double gamma, double r_stay, double r_goal,
                                                         int iterations = 10000) {
  std::array<std::array<double, 2>, 2> q{};
  for (int it = 0; it < iterations; ++it) {
    const double v0 = std::max(q[0][0], q[0][1]);
    std::array<std::array<double, 2>, 2> n{};
    n[0][0] = r_stay + gamma * v0;
    n[0][1] = gamma * std::max(q[1][0], q[1][1]);
    n[1][0] = r_goal;
    n[1][1] = r_goal;
    q = n;
  }
  return q;
}

}  // namespace dowham::oracle
