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
#ifndef TOKMEM_THREADS_HPP_
#define TOKMEM_THREADS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tokmem/records.hpp"
#include "tokmem/time_utc.hpp"

namespace tokmem {

// One request inside a reconstructed thread. message_index is 1-based and
// pause_seconds is absent exactly for the first message; both are filled by
// annotate().
struct Message {
  UtcSeconds timestamp{};
  std::uint64_t prompt_tokens{};
  std::uint64_t completion_tokens{};
  std::uint64_t source_line{};
  std::uint32_t message_index{};
  std::optional<std::int64_t> pause_seconds;

  friend bool operator==(const Message&, const Message&) = default;
};

struct Thread {
  std::string thread_id;
  std::string user_id;
  bool orphan{};
  std::vector<Message> messages;

  friend bool operator==(const Thread&, const Thread&) = default;
};

// Pairs a detected title-helper record with the thread-start record it points
// at. Indices refer to the record span passed to detect_helpers.
struct HelperMarker {
  std::size_t helper_index{};
  std::size_t start_index{};
};

struct ThreadDiagnostics {
  std::vector<std::string> notes;
  std::size_t helper_count{};
  std::size_t orphan_thread_count{};
};

enum class MonotonicMode { NonDecreasing, StrictlyIncreasing };

// Accepts the CLI spellings "nondecreasing" and "strict".
MonotonicMode parse_monotonic_mode(std::string_view tag);
std::string_view monotonic_mode_tag(MonotonicMode mode);

// Modal positive prompt-token difference over same-user records sharing a
// timestamp; ties break toward the smallest difference. Records must be
// ordered per sort_records. Throws FatalError when no pair exists.
std::uint64_t infer_title_delta(std::span<const LogRecord> records);

// Marks record h as a helper when some same-user record m shares its
// timestamp and h.prompt_tokens = m.prompt_tokens + delta. Each start is
// claimed at most once; ambiguous pairings resolve to the lowest source_line
// and are reported through diag. Records must be ordered per sort_records.
std::vector<HelperMarker> detect_helpers(std::span<const LogRecord> records,
                                         std::uint64_t delta,
                                         ThreadDiagnostics* diag = nullptr);

// Deletes helper records, opens a thread at each marker's start record, and
// assigns every following record of that user to the open thread. Records
// seen before a user's first marker form one thread flagged orphan.
std::vector<Thread> label_threads(std::span<const LogRecord> records,
                                  std::span<const HelperMarker> markers,
                                  ThreadDiagnostics* diag = nullptr);

// Drops threads whose prompt_tokens sequence violates the selected
// monotonicity mode. Returns surviving threads and the dropped count.
std::pair<std::vector<Thread>, std::size_t> filter_irregular(
    std::vector<Thread> threads, MonotonicMode mode);

// Fills message_index 1..n and pause_seconds (absent on the first message).
void annotate(std::vector<Thread>& threads);

// Thread interchange format: JSONL, one thread object per line.
void write_threads(std::ostream& out, std::span<const Thread> threads);
std::vector<Thread> read_threads(std::istream& in);
std::vector<Thread> read_threads_file(const std::string& path);

}  // namespace tokmem

#endif  // TOKMEM_THREADS_HPP_
