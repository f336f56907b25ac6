/* Copyright 2026 The tokmem Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tokmem/time_utc.hpp"

namespace tokmem {

// One raw API-call row from an anonymized token log.
struct LogRecord {
  UtcSeconds timestamp{};
  std::string user_id;
  std::uint64_t prompt_tokens{};
  std::uint64_t completion_tokens{};
  // 1-based physical line in the source file where the row started.
  std::uint64_t source_line{};

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct RejectedRow {
  std::uint64_t line{};
  std::string reason;

  friend bool operator==(const RejectedRow&, const RejectedRow&) = default;
};

struct ValidationReport {
  std::uint64_t row_count{};   // accepted rows
  std::uint64_t user_count{};  // distinct user ids among accepted rows
  std::optional<std::pair<UtcSeconds, UtcSeconds>> time_span;
  std::vector<RejectedRow> rejected_rows;
};

}  // namespace tokmem
