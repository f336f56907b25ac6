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
#ifndef TOKMEM_MEMORY_MODEL_HPP_
#define TOKMEM_MEMORY_MODEL_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tokmem {

// One user/assistant exchange. pause_before_seconds is the gap since the
// previous turn and is absent for the first turn of a conversation.
struct Turn {
  std::uint64_t user_tokens{};
  std::uint64_t completion_tokens{};
  std::optional<std::int64_t> pause_before_seconds;
};

// T (custom-instruction template, sent with the first request of a
// conversation) and L (model input limit; accumulation clamps here).
struct ModelLimits {
  std::uint64_t template_tokens{};
  std::uint64_t token_limit{std::numeric_limits<std::uint64_t>::max()};
};

// Sentinel threshold meaning "never reset".
inline constexpr std::int64_t kNoThreshold =
    std::numeric_limits<std::int64_t>::max();

struct MemoryPolicy {
  enum class Kind { FullHistory, BufferWindow, SummaryMemory, IdleReset };

  Kind kind{Kind::FullHistory};
  std::uint64_t window_k{};                // BufferWindow: exchanges retained
  std::uint64_t summary_tokens{};          // SummaryMemory: compressed size
  std::uint64_t trigger_history_tokens{};  // SummaryMemory: compress above
  std::int64_t threshold_seconds{};        // IdleReset: strict > comparison

  static MemoryPolicy full_history();
  static MemoryPolicy buffer_window(std::uint64_t k);
  static MemoryPolicy summary_memory(std::uint64_t summary_tokens,
                                     std::uint64_t trigger_history_tokens);
  static MemoryPolicy idle_reset(std::int64_t threshold_seconds);
};

// CLI descriptor grammar:
//   full | window:k=5 | summary:trigger=2000,summary=200 | idle:threshold=1800
// idle accepts threshold=inf for the never-reset sentinel.
MemoryPolicy parse_policy(std::string_view descriptor);
std::string format_policy(const MemoryPolicy& policy);

struct Accumulation {
  std::vector<std::uint64_t> prompt_tokens;
  std::uint64_t overhead_tokens{};
};

// Models prompt growth: request n carries the template, the retained
// history, and the new user message, clamped at the token limit.
// SummaryMemory compresses retained history to summary_tokens whenever it
// exceeds the trigger, charging (replaced history + summary) as overhead.
Accumulation accumulate(std::span<const Turn> turns, const ModelLimits& limits,
                        const MemoryPolicy& policy);

// Sum of per-request prompt tokens plus overhead.
std::uint64_t policy_total(std::span<const Turn> turns,
                           const ModelLimits& limits,
                           const MemoryPolicy& policy);

}  // namespace tokmem

#endif  // TOKMEM_MEMORY_MODEL_HPP_
