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
#include "tokmem/memory_model.hpp"

#include <charconv>
#include <deque>

#include "tokmem/errors.hpp"

namespace tokmem {

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s < a ? std::numeric_limits<std::uint64_t>::max() : s;
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  std::uint64_t v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw UsageError("invalid " + std::string(what) + " '" + std::string(s) +
                     "'");
  }
  return v;
}

// key=value pairs separated by commas, in any order, each key required once.
std::string_view expect_param(std::string_view params, std::string_view key) {
  std::string_view found;
  bool seen = false;
  std::size_t pos = 0;
  while (pos <= params.size()) {
    std::size_t comma = params.find(',', pos);
    std::string_view item = params.substr(
        pos, comma == std::string_view::npos ? params.size() - pos
                                             : comma - pos);
    std::size_t eq = item.find('=');
    if (eq != std::string_view::npos && item.substr(0, eq) == key) {
      if (seen) throw UsageError("duplicate policy parameter '" +
                                 std::string(key) + "'");
      found = item.substr(eq + 1);
      seen = true;
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (!seen) {
    throw UsageError("policy is missing parameter '" + std::string(key) + "'");
  }
  return found;
}

}  // namespace

MemoryPolicy MemoryPolicy::full_history() {
  return MemoryPolicy{};
}

MemoryPolicy MemoryPolicy::buffer_window(std::uint64_t k) {
  MemoryPolicy p;
  p.kind = Kind::BufferWindow;
  p.window_k = k;
  return p;
}

MemoryPolicy MemoryPolicy::summary_memory(std::uint64_t summary_tokens,
                                          std::uint64_t trigger) {
  MemoryPolicy p;
  p.kind = Kind::SummaryMemory;
  p.summary_tokens = summary_tokens;
  p.trigger_history_tokens = trigger;
  return p;
}

MemoryPolicy MemoryPolicy::idle_reset(std::int64_t threshold_seconds) {
  MemoryPolicy p;
  p.kind = Kind::IdleReset;
  p.threshold_seconds = threshold_seconds;
  return p;
}

MemoryPolicy parse_policy(std::string_view descriptor) {
  if (descriptor == "full") return MemoryPolicy::full_history();
  std::size_t colon = descriptor.find(':');
  std::string_view head = descriptor.substr(0, colon);
  std::string_view params =
      colon == std::string_view::npos ? std::string_view{}
                                      : descriptor.substr(colon + 1);
  if (head == "window") {
    return MemoryPolicy::buffer_window(
        parse_u64(expect_param(params, "k"), "window size"));
  }
  if (head == "summary") {
    std::uint64_t trigger =
        parse_u64(expect_param(params, "trigger"), "summary trigger");
    std::uint64_t summary =
        parse_u64(expect_param(params, "summary"), "summary size");
    if (summary < 1) throw UsageError("summary size must be >= 1");
    return MemoryPolicy::summary_memory(summary, trigger);
  }
  if (head == "idle") {
    std::string_view raw = expect_param(params, "threshold");
    std::int64_t threshold;
    if (raw == "inf") {
      threshold = kNoThreshold;
    } else {
      std::uint64_t v = parse_u64(raw, "idle threshold");
      if (v == 0 || v > static_cast<std::uint64_t>(kNoThreshold)) {
        throw UsageError("idle threshold must be positive");
      }
      threshold = static_cast<std::int64_t>(v);
    }
    return MemoryPolicy::idle_reset(threshold);
  }
  throw UsageError("unknown policy '" + std::string(descriptor) +
                   "' (expected full, window:k=, summary:trigger=,summary=, "
                   "or idle:threshold=)");
}

std::string format_policy(const MemoryPolicy& policy) {
  switch (policy.kind) {
    case MemoryPolicy::Kind::FullHistory:
      return "full";
    case MemoryPolicy::Kind::BufferWindow:
      return "window:k=" + std::to_string(policy.window_k);
    case MemoryPolicy::Kind::SummaryMemory:
      return "summary:trigger=" + std::to_string(policy.trigger_history_tokens) +
             ",summary=" + std::to_string(policy.summary_tokens);
    case MemoryPolicy::Kind::IdleReset:
      return policy.threshold_seconds == kNoThreshold
                 ? std::string("idle:threshold=inf")
                 : "idle:threshold=" + std::to_string(policy.threshold_seconds);
  }
  return "full";
}

Accumulation accumulate(std::span<const Turn> turns, const ModelLimits& limits,
                        const MemoryPolicy& policy) {
  Accumulation out;
  out.prompt_tokens.reserve(turns.size());

  std::uint64_t history = 0;
  std::deque<std::uint64_t> window;  // BufferWindow only

  for (const Turn& turn : turns) {
    if (policy.kind == MemoryPolicy::Kind::IdleReset &&
        turn.pause_before_seconds &&
        *turn.pause_before_seconds > policy.threshold_seconds) {
      history = 0;
    }
    if (policy.kind == MemoryPolicy::Kind::SummaryMemory &&
        history > policy.trigger_history_tokens) {
      out.overhead_tokens =
          sat_add(out.overhead_tokens, sat_add(history, policy.summary_tokens));
      history = policy.summary_tokens;
    }

    std::uint64_t prompt =
        sat_add(sat_add(limits.template_tokens, history), turn.user_tokens);
    out.prompt_tokens.push_back(std::min(prompt, limits.token_limit));

    std::uint64_t exchange = sat_add(turn.user_tokens, turn.completion_tokens);
    if (policy.kind == MemoryPolicy::Kind::BufferWindow) {
      window.push_back(exchange);
      history = sat_add(history, exchange);
      if (window.size() > policy.window_k) {
        history -= window.front();
        window.pop_front();
      }
    } else {
      history = sat_add(history, exchange);
    }
  }
  return out;
}

std::uint64_t policy_total(std::span<const Turn> turns,
                           const ModelLimits& limits,
                           const MemoryPolicy& policy) {
  Accumulation acc = accumulate(turns, limits, policy);
  std::uint64_t total = acc.overhead_tokens;
  for (std::uint64_t p : acc.prompt_tokens) total = sat_add(total, p);
  return total;
}

}  // namespace tokmem
