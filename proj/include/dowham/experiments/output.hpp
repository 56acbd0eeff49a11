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

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dowham/errors.hpp"

namespace dowham::experiments {

/// What to do when a run directory already holds artifacts.
enum class OutputPolicy : std::uint8_t { overwrite, fail_if_exists };

/// `<root>/<study>/<task>/<engine>/<seed>`.
inline std::filesystem::path run_dir(const std::filesystem::path& root, std::string_view study,
                                     std::string_view task_slug, std::string_view engine, std::uint64_t seed) {
  return root / std::string(study) / std::string(task_slug) / std::string(engine) / std::to_string(seed);
}

/// Creates `dir` (and parents). Under fail_if_exists a non-empty directory is an I/O error.
inline void prepare_dir(const std::filesystem::path& dir, OutputPolicy policy) {
  std::error_code ec;
  if (policy == OutputPolicy::fail_if_exists && std::filesystem::exists(dir, ec) &&
      !std::filesystem::is_empty(dir, ec)) {
    throw IoError("output directory already exists: " + dir.string() + " (pass --overwrite to replace)");
  }
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

/// Writes a file through `fill`; any stream failure becomes an IoError.
inline void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  fill(out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Metadata sidecar: `key value` lines plus the only timestamp in a run directory.
inline void write_meta(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  write_file(path, [&](std::ostream& os) {
    for (const auto& [k, v] : kv) os << k << ' ' << v << '\n';
    os << "created " << utc_timestamp() << '\n';
  });
}

}  // namespace dowham::experiments
