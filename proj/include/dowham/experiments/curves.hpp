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
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dowham/agent/trainer.hpp"
#include "dowham/errors.hpp"
#include "dowham/hash.hpp"

namespace dowham::experiments {

using agent::CurvePoint;
using Curve = std::vector<CurvePoint>;

inline constexpr const char* kCurveHeader = "step,success_rate,mean_extrinsic_return,seed";

inline void write_curve_csv(std::ostream& os, const Curve& curve) {
  os << kCurveHeader << '\n';
  for (const auto& p : curve) {
    os << p.step << ',' << format_double(p.success_rate) << ',' << format_double(p.mean_return) << ',' << p.seed << '\n';
  }
}

inline Curve parse_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCurveHeader) throw IoError("curve csv: missing header");
  Curve out;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    CurvePoint p;
    if (f.size() != 4 || !parse_int(f[0], p.step) || !parse_double(f[1], p.success_rate) ||
        !parse_double(f[2], p.mean_return) || !parse_int(f[3], p.seed)) {
      throw IoError("curve csv: malformed line " + std::to_string(line_no));
    }
    out.push_back(p);
  }
  return out;
}

/// Mean over the points whose step lies in (step - window, step].
inline Curve rolling_mean(const Curve& curve, std::uint64_t window) {
  if (window < 1) throw ContractViolation("rolling_mean: window must be >= 1");
  Curve out;
  out.reserve(curve.size());
  std::size_t lo = 0;
  double s_sum = 0.0;
  double r_sum = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    s_sum += curve[i].success_rate;
    r_sum += curve[i].mean_return;
    while (curve[lo].step + window <= curve[i].step) {
      s_sum -= curve[lo].success_rate;
      r_sum -= curve[lo].mean_return;
      ++lo;
    }
    const double n = static_cast<double>(i - lo + 1);
    out.push_back({curve[i].step, s_sum / n, r_sum / n, curve[i].seed});
  }
  return out;
}

/// Desk-scale smoothing window.
inline std::uint64_t rolling_window(std::uint64_t budget) { return std::max<std::uint64_t>(budget / 25, 1000); }

struct AggregateRow {
  std::uint64_t step = 0;
  double success_mean = 0.0;
  double success_std = 0.0;
  double return_mean = 0.0;
  double return_std = 0.0;
  std::size_t seeds = 0;
};

/// Rolling-mean each seed's curve, then mean and population std across seeds
/// at every evaluation step shared by all curves.
inline std::vector<AggregateRow> aggregate_curves(const std::vector<Curve>& curves, std::uint64_t window) {
  if (curves.empty()) throw ContractViolation("aggregate_curves: no curves");
  std::vector<Curve> smooth;
  smooth.reserve(curves.size());
  for (const auto& c : curves) smooth.push_back(rolling_mean(c, window));
  const std::size_t len = smooth.front().size();
  for (const auto& c : smooth) {
    if (c.size() != len) throw ContractViolation("aggregate_curves: curves have different lengths");
  }
  std::vector<AggregateRow> rows;
  rows.reserve(len);
  const double n = static_cast<double>(smooth.size());
  for (std::size_t i = 0; i < len; ++i) {
    AggregateRow row;
    row.step = smooth.front()[i].step;
    row.seeds = smooth.size();
    for (const auto& c : smooth) {
      if (c[i].step != row.step) throw ContractViolation("aggregate_curves: evaluation steps differ");
      row.success_mean += c[i].success_rate / n;
      row.return_mean += c[i].mean_return / n;
    }
    double sv = 0.0;
    double rv = 0.0;
    for (const auto& c : smooth) {
      sv += (c[i].success_rate - row.success_mean) * (c[i].success_rate - row.success_mean);
      rv += (c[i].mean_return - row.return_mean) * (c[i].mean_return - row.return_mean);
    }
    row.success_std = std::sqrt(sv / n);
    row.return_std = std::sqrt(rv / n);
    rows.push_back(row);
  }
  return rows;
}

inline void write_aggregate_csv(std::ostream& os, const std::string& task, const std::string& engine,
                                const std::vector<AggregateRow>& rows) {
  for (const auto& r : rows) {
    os << task << ',' << engine << ',' << r.step << ',' << format_double(r.success_mean) << ','
       << format_double(r.success_std) << ',' << format_double(r.return_mean) << ',' << format_double(r.return_std)
       << ',' << r.seeds << '\n';
  }
}

inline constexpr const char* kAggregateHeader =
    "task,engine,step,success_mean,success_std,return_mean,return_std,seeds";

}  // namespace dowham::experiments
