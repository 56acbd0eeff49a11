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
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dowham/errors.hpp"
#include "dowham/hash.hpp"

namespace dowham::experiments {

/// Per-cell visit totals over agent (x, y) positions; orientation is marginalized.
struct VisitHeatmap {
  int width = 0;
  int height = 0;
  std::vector<std::uint64_t> counts;  // row-major, y * width + x

  VisitHeatmap() = default;
  VisitHeatmap(int w, int h) : width(w), height(h), counts(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {
    if (w < 1 || h < 1) throw ContractViolation("VisitHeatmap: dimensions must be positive");
  }

  std::size_t index(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) throw ContractViolation("VisitHeatmap: cell out of range");
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  std::uint64_t& at(int x, int y) { return counts[index(x, y)]; }
  std::uint64_t at(int x, int y) const { return counts[index(x, y)]; }
  void add(int x, int y) { ++at(x, y); }

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
  std::uint64_t max() const { return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end()); }

  /// Cell-wise sum; dimensions must agree.
  void merge(const VisitHeatmap& other) {
    if (other.width != width || other.height != height) throw ContractViolation("VisitHeatmap: size mismatch");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  }

  friend bool operator==(const VisitHeatmap&, const VisitHeatmap&) = default;
};

/// Raw counts, one comma-separated row per y.
inline void write_heatmap_csv(std::ostream& os, const VisitHeatmap& h) {
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) {
      if (x) os << ',';
      os << h.at(x, y);
    }
    os << '\n';
  }
}

inline VisitHeatmap parse_heatmap_csv(std::istream& is) {
  std::vector<std::vector<std::uint64_t>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::uint64_t> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      std::uint64_t v = 0;
      if (!parse_int(field, v)) throw IoError("heatmap csv: bad count '" + field + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw IoError("heatmap csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw IoError("heatmap csv: empty");
  VisitHeatmap h(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) h.at(x, y) = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
  }
  return h;
}

/// Plain (P2) graymap; intensity = round(255 * log(1 + c) / log(1 + max)), all black when empty.
inline void write_heatmap_pgm(std::ostream& os, const VisitHeatmap& h) {
  os << "P2\n" << h.width << ' ' << h.height << "\n255\n";
  const double denom = std::log1p(static_cast<double>(h.max()));
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) {
      const std::uint64_t c = h.at(x, y);
      const int v = denom > 0.0 ? static_cast<int>(std::lround(255.0 * std::log1p(static_cast<double>(c)) / denom)) : 0;
      if (x) os << ' ';
      os << v;
    }
    os << '\n';
  }
}

/// Writes `<stem>.csv` and `<stem>.pgm`.
inline void export_heatmap(const VisitHeatmap& h, const std::filesystem::path& stem) {
  for (const char* ext : {".csv", ".pgm"}) {
    std::filesystem::path p = stem;
    p += ext;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    if (std::string(ext) == ".csv") {
      write_heatmap_csv(out, h);
    } else {
      write_heatmap_pgm(out, h);
    }
    if (!out) throw IoError("write failed: " + p.string());
  }
}

}  // namespace dowham::experiments
