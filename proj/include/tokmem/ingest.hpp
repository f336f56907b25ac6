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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tokmem/records.hpp"

namespace tokmem {

enum class LogFormat { Csv, Jsonl };

// "csv" or "jsonl". Anything else throws UsageError.
LogFormat parse_format_tag(std::string_view tag);
std::string_view format_tag(LogFormat format);

// Remaps the canonical schema names onto foreign column/key names.
struct ColumnMap {
  std::string datetime = "datetime_UTC";
  std::string user = "user_id";
  std::string prompt = "prompt_tokens";
  std::string completion = "completion_tokens";
};

// Token counts above this are rejected ("token count out of range") so that
// downstream 64-bit aggregation can never overflow; see kernels.hpp.
inline constexpr std::uint64_t kMaxTokenCount = UINT64_C(1'000'000'000'000);

struct ParseResult {
  std::vector<LogRecord> records;
  ValidationReport report;
};

// Parses a whole log. Malformed rows are skipped and recorded with a reason;
// accepted records preserve file order. Never throws on row content — the
// only fatal conditions are an unreadable stream (FatalError) and an unknown
// format tag (UsageError upstream).
ParseResult parse_log(std::istream& in, LogFormat format,
                      const ColumnMap& columns = {});
ParseResult parse_log(std::string_view data, LogFormat format,
                      const ColumnMap& columns = {});
ParseResult parse_log_file(const std::string& path, LogFormat format,
                           const ColumnMap& columns = {});

// Stable sort by (user_id, timestamp, source_line).
void sort_records(std::vector<LogRecord>& records);

// Canonical serialization. write_csv emits the exact schema header; both
// forms re-parse to the same field values.
void write_csv(std::ostream& out, std::span<const LogRecord> records,
               const ColumnMap& columns = {});
void write_jsonl(std::ostream& out, std::span<const LogRecord> records,
                 const ColumnMap& columns = {});

}  // namespace tokmem
