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
#include "tokmem/threads.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "tokmem/errors.hpp"

namespace tokmem {

namespace {

using ordered_json = nlohmann::ordered_json;

// Caps the pairwise work inside one (user, timestamp) group so adversarial
// input with a huge identical-timestamp block stays linear-ish.
constexpr std::size_t kMaxGroupPairs = 10'000'000;

template <typename Fn>
void for_each_same_stamp_group(std::span<const LogRecord> records, Fn&& fn) {
  std::size_t lo = 0;
  while (lo < records.size()) {
    std::size_t hi = lo + 1;
    while (hi < records.size() && records[hi].user_id == records[lo].user_id &&
           records[hi].timestamp == records[lo].timestamp) {
      ++hi;
    }
    fn(lo, hi);
    lo = hi;
  }
}

}  // namespace

MonotonicMode parse_monotonic_mode(std::string_view tag) {
  if (tag == "nondecreasing") return MonotonicMode::NonDecreasing;
  if (tag == "strict") return MonotonicMode::StrictlyIncreasing;
  throw UsageError("unknown monotonic mode '" + std::string(tag) +
                   "' (expected nondecreasing or strict)");
}

std::string_view monotonic_mode_tag(MonotonicMode mode) {
  return mode == MonotonicMode::NonDecreasing ? "nondecreasing" : "strict";
}

std::uint64_t infer_title_delta(std::span<const LogRecord> records) {
  std::unordered_map<std::uint64_t, std::uint64_t> votes;
  for_each_same_stamp_group(records, [&](std::size_t lo, std::size_t hi) {
    std::size_t n = hi - lo;
    if (n < 2) return;
    // n capped so the quadratic pair walk stays bounded.
    std::size_t limit = n;
    while (limit > 2 && limit * (limit - 1) / 2 > kMaxGroupPairs) --limit;
    for (std::size_t i = lo; i < lo + limit; ++i) {
      for (std::size_t j = i + 1; j < lo + limit; ++j) {
        std::uint64_t a = records[i].prompt_tokens;
        std::uint64_t b = records[j].prompt_tokens;
        std::uint64_t d = a > b ? a - b : b - a;
        if (d > 0) ++votes[d];
      }
    }
  });
  if (votes.empty()) {
    throw FatalError("cannot infer delta; supply --title-delta");
  }
  std::uint64_t best_delta = 0;
  std::uint64_t best_votes = 0;
  for (const auto& [delta, count] : votes) {
    if (count > best_votes || (count == best_votes && delta < best_delta)) {
      best_delta = delta;
      best_votes = count;
    }
  }
  return best_delta;
}

std::vector<HelperMarker> detect_helpers(std::span<const LogRecord> records,
                                         std::uint64_t delta,
                                         ThreadDiagnostics* diag) {
  std::vector<HelperMarker> markers;
  if (delta == 0) return markers;
  std::vector<char> is_helper(records.size(), 0);
  std::vector<char> is_start(records.size(), 0);

  for_each_same_stamp_group(records, [&](std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_prompt;
    for (std::size_t i = lo; i < hi; ++i) {
      by_prompt[records[i].prompt_tokens].push_back(i);
    }
    for (std::size_t h = lo; h < hi; ++h) {
      if (is_start[h] || records[h].prompt_tokens < delta) continue;
      auto it = by_prompt.find(records[h].prompt_tokens - delta);
      if (it == by_prompt.end()) continue;
      std::vector<std::size_t> candidates;
      for (std::size_t m : it->second) {
        if (m != h && !is_helper[m] && !is_start[m]) candidates.push_back(m);
      }
      if (candidates.empty()) continue;
      std::size_t chosen = candidates.front();  // group order = line order
      if (candidates.size() > 1 && diag != nullptr) {
        std::ostringstream note;
        note << "ambiguous helper at line " << records[h].source_line
             << ": start candidates at lines";
        for (std::size_t m : candidates) note << ' ' << records[m].source_line;
        note << "; paired with line " << records[chosen].source_line;
        diag->notes.push_back(note.str());
      }
      is_helper[h] = 1;
      is_start[chosen] = 1;
      markers.push_back({h, chosen});
    }
  });
  if (diag != nullptr) diag->helper_count += markers.size();
  return markers;
}

std::vector<Thread> label_threads(std::span<const LogRecord> records,
                                  std::span<const HelperMarker> markers,
                                  ThreadDiagnostics* diag) {
  std::vector<char> is_helper(records.size(), 0);
  std::vector<char> is_start(records.size(), 0);
  for (const HelperMarker& m : markers) {
    is_helper[m.helper_index] = 1;
    is_start[m.start_index] = 1;
  }

  std::vector<Thread> threads;
  std::size_t user_lo = 0;
  while (user_lo < records.size()) {
    std::size_t user_hi = user_lo + 1;
    while (user_hi < records.size() &&
           records[user_hi].user_id == records[user_lo].user_id) {
      ++user_hi;
    }
    const std::string& user = records[user_lo].user_id;

    Thread orphan;
    orphan.thread_id = user + "#orphan";
    orphan.user_id = user;
    orphan.orphan = true;

    std::vector<Thread> user_threads;
    bool open = false;
    for (std::size_t i = user_lo; i < user_hi; ++i) {
      if (is_helper[i]) continue;
      if (is_start[i]) {
        Thread t;
        t.thread_id = user + "#" + std::to_string(user_threads.size() + 1);
        t.user_id = user;
        user_threads.push_back(std::move(t));
        open = true;
      }
      const LogRecord& r = records[i];
      Message msg;
      msg.timestamp = r.timestamp;
      msg.prompt_tokens = r.prompt_tokens;
      msg.completion_tokens = r.completion_tokens;
      msg.source_line = r.source_line;
      if (open) {
        user_threads.back().messages.push_back(msg);
      } else {
        orphan.messages.push_back(msg);
      }
    }
    if (!orphan.messages.empty()) {
      if (diag != nullptr) ++diag->orphan_thread_count;
      threads.push_back(std::move(orphan));
    }
    for (Thread& t : user_threads) threads.push_back(std::move(t));
    user_lo = user_hi;
  }
  return threads;
}

std::pair<std::vector<Thread>, std::size_t> filter_irregular(
    std::vector<Thread> threads, MonotonicMode mode) {
  std::vector<Thread> kept;
  kept.reserve(threads.size());
  std::size_t dropped = 0;
  for (Thread& t : threads) {
    bool regular = true;
    for (std::size_t i = 1; i < t.messages.size(); ++i) {
      std::uint64_t prev = t.messages[i - 1].prompt_tokens;
      std::uint64_t cur = t.messages[i].prompt_tokens;
      bool violation = mode == MonotonicMode::NonDecreasing ? cur < prev
                                                            : cur <= prev;
      if (violation) {
        regular = false;
        break;
      }
    }
    if (regular) {
      kept.push_back(std::move(t));
    } else {
      ++dropped;
    }
  }
  return {std::move(kept), dropped};
}

void annotate(std::vector<Thread>& threads) {
  for (Thread& t : threads) {
    for (std::size_t i = 0; i < t.messages.size(); ++i) {
      t.messages[i].message_index = static_cast<std::uint32_t>(i + 1);
      if (i == 0) {
        t.messages[i].pause_seconds.reset();
      } else {
        t.messages[i].pause_seconds =
            t.messages[i].timestamp - t.messages[i - 1].timestamp;
      }
    }
  }
}

void write_threads(std::ostream& out, std::span<const Thread> threads) {
  for (const Thread& t : threads) {
    ordered_json obj;
    obj["thread_id"] = t.thread_id;
    obj["user_id"] = t.user_id;
    obj["orphan"] = t.orphan;
    ordered_json messages = ordered_json::array();
    for (const Message& m : t.messages) {
      ordered_json jm;
      jm["message_index"] = m.message_index;
      jm["datetime_UTC"] = format_utc(m.timestamp);
      jm["prompt_tokens"] = m.prompt_tokens;
      jm["completion_tokens"] = m.completion_tokens;
      if (m.pause_seconds) jm["pause_in_seconds"] = *m.pause_seconds;
      messages.push_back(std::move(jm));
    }
    obj["messages"] = std::move(messages);
    out << obj.dump(-1, ' ', false,
                    nlohmann::json::error_handler_t::replace)
        << '\n';
  }
}

std::vector<Thread> read_threads(std::istream& in) {
  std::vector<Thread> threads;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fail = [&]() -> FatalError {
      return FatalError("invalid thread file at line " +
                        std::to_string(lineno));
    };
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw fail();
    if (!obj.contains("thread_id") || !obj["thread_id"].is_string() ||
        !obj.contains("user_id") || !obj["user_id"].is_string() ||
        !obj.contains("messages") || !obj["messages"].is_array()) {
      throw fail();
    }
    Thread t;
    t.thread_id = obj["thread_id"].get<std::string>();
    t.user_id = obj["user_id"].get<std::string>();
    t.orphan = obj.value("orphan", false);
    for (const nlohmann::json& jm : obj["messages"]) {
      if (!jm.is_object() || !jm.contains("datetime_UTC") ||
          !jm["datetime_UTC"].is_string() || !jm.contains("prompt_tokens") ||
          !jm["prompt_tokens"].is_number_unsigned() ||
          !jm.contains("completion_tokens") ||
          !jm["completion_tokens"].is_number_unsigned()) {
        throw fail();
      }
      auto ts = parse_utc(jm["datetime_UTC"].get_ref<const std::string&>());
      if (!ts) throw fail();
      Message m;
      m.timestamp = *ts;
      m.prompt_tokens = jm["prompt_tokens"].get<std::uint64_t>();
      m.completion_tokens = jm["completion_tokens"].get<std::uint64_t>();
      m.message_index = static_cast<std::uint32_t>(t.messages.size() + 1);
      if (m.message_index > 1) {
        if (jm.contains("pause_in_seconds") &&
            jm["pause_in_seconds"].is_number_integer()) {
          m.pause_seconds = jm["pause_in_seconds"].get<std::int64_t>();
        } else {
          m.pause_seconds = m.timestamp - t.messages.back().timestamp;
        }
      }
      t.messages.push_back(std::move(m));
    }
    if (t.messages.empty()) throw fail();
    threads.push_back(std::move(t));
  }
  return threads;
}

std::vector<Thread> read_threads_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot open input file: " + path);
  return read_threads(in);
}

}  // namespace tokmem
