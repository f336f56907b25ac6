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
#include "tokmem/simulate.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "tokmem/errors.hpp"
#include "tokmem/kernels.hpp"
#include "tokmem/parallel.hpp"

namespace tokmem {

namespace {

using ordered_json = nlohmann::ordered_json;

// Per-thread reset walk shared by apply_reset and the sweep hot path. The
// pause scan fills base[] (kNoBase ahead of the first reset, the cumulative
// removed total afterwards), then one kernel call computes max(1, p - base)
// into out. Returns the reset count.
std::uint64_t adjust_prompts(const Thread& thread,
                             std::int64_t threshold_seconds,
                             const kernels::Implementation& impl,
                             std::span<const std::int64_t> prompts,
                             std::span<std::int64_t> base,
                             std::span<std::int64_t> out,
                             std::vector<char>* reset_flags) {
  const std::size_t n = prompts.size();
  std::uint64_t resets = 0;
  std::int64_t removed = 0;
  std::int64_t current = kernels::kNoBase;

  for (std::size_t j = 0; j < n; ++j) {
    const Message& m = thread.messages[j];
    if (j > 0 && m.pause_seconds && *m.pause_seconds > threshold_seconds) {
      std::int64_t prev_adjusted = prompts[j - 1] - removed;
      if (prev_adjusted > 0) removed += prev_adjusted;
      current = removed;
      ++resets;
      if (reset_flags != nullptr) (*reset_flags)[j] = 1;
    }
    base[j] = current;
  }
  impl.reset_adjust_i64(prompts.data(), base.data(), out.data(), n);
  return resets;
}

}  // namespace

AdjustedThread apply_reset(const Thread& thread,
                           std::int64_t threshold_seconds) {
  const kernels::Implementation& impl = kernels::active();
  const std::size_t n = thread.messages.size();

  std::vector<std::int64_t> prompts(n);
  for (std::size_t i = 0; i < n; ++i) {
    prompts[i] = static_cast<std::int64_t>(thread.messages[i].prompt_tokens);
  }
  std::vector<std::int64_t> base(n);
  std::vector<std::int64_t> adjusted(n);
  std::vector<char> flags(n, 0);
  adjust_prompts(thread, threshold_seconds, impl, prompts, base, adjusted,
                 &flags);

  AdjustedThread out;
  out.thread_id = thread.thread_id;
  out.messages.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.messages.push_back({thread.messages[i].prompt_tokens,
                            static_cast<std::uint64_t>(adjusted[i]),
                            flags[i] != 0});
  }
  return out;
}

std::vector<std::uint64_t> replay_oracle(std::span<const Turn> turns,
                                         const ModelLimits& limits,
                                         std::int64_t threshold_seconds) {
  return accumulate(turns, limits, MemoryPolicy::idle_reset(threshold_seconds))
      .prompt_tokens;
}

std::vector<SimulationResult> sweep(std::span<const Thread> threads,
                                    std::span<const std::int64_t> thresholds,
                                    bool keep_orphans, int jobs) {
  const kernels::Implementation& impl = kernels::active();

  std::vector<const Thread*> eligible;
  eligible.reserve(threads.size());
  for (const Thread& t : threads) {
    if (t.orphan && !keep_orphans) continue;
    if (t.messages.empty()) continue;
    eligible.push_back(&t);
  }

  std::uint64_t before = 0;
  {
    std::vector<std::uint64_t> partial(chunk_count(eligible.size(), jobs), 0);
    parallel_chunks(eligible.size(), jobs,
                    [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
                      std::uint64_t sum = 0;
                      std::vector<std::uint64_t> prompts;
                      for (std::size_t i = lo; i < hi; ++i) {
                        prompts.clear();
                        for (const Message& m : eligible[i]->messages) {
                          prompts.push_back(m.prompt_tokens);
                        }
                        sum += impl.sum_u64(prompts.data(), prompts.size());
                      }
                      partial[chunk] = sum;
                    });
    for (std::uint64_t p : partial) before += p;
  }

  std::vector<SimulationResult> results;
  results.reserve(thresholds.size());
  for (std::int64_t threshold : thresholds) {
    struct Partial {
      std::uint64_t after{};
      std::uint64_t affected{};
      std::uint64_t resets{};
    };
    std::vector<Partial> partial(chunk_count(eligible.size(), jobs));
    parallel_chunks(
        eligible.size(), jobs,
        [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
          Partial acc;
          std::vector<std::int64_t> prompts;
          std::vector<std::int64_t> base;
          std::vector<std::int64_t> adjusted;
          for (std::size_t i = lo; i < hi; ++i) {
            const Thread& t = *eligible[i];
            prompts.clear();
            for (const Message& m : t.messages) {
              prompts.push_back(static_cast<std::int64_t>(m.prompt_tokens));
            }
            base.resize(prompts.size());
            adjusted.resize(prompts.size());
            std::uint64_t resets = adjust_prompts(
                t, threshold, impl, prompts, base, adjusted, nullptr);
            acc.resets += resets;
            if (resets > 0) ++acc.affected;
            acc.after += impl.sum_u64(
                reinterpret_cast<const std::uint64_t*>(adjusted.data()),
                adjusted.size());
          }
          partial[chunk] = acc;
        });

    SimulationResult r;
    r.threshold_seconds = threshold;
    r.total_prompt_tokens_before = before;
    for (const Partial& p : partial) {
      r.total_prompt_tokens_after += p.after;
      r.threads_affected += p.affected;
      r.resets_applied += p.resets;
    }
    r.reduction_fraction =
        before == 0 ? 0.0
                    : static_cast<double>(before - r.total_prompt_tokens_after) /
                          static_cast<double>(before);
    results.push_back(r);
  }
  return results;
}

std::vector<std::int64_t> default_thresholds() {
  return {86400, 43200, 21600, 10800, 3600, 1800};
}

std::vector<std::int64_t> parse_thresholds(std::string_view list) {
  std::vector<std::int64_t> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    std::string_view item = list.substr(
        pos, comma == std::string_view::npos ? list.size() - pos : comma - pos);
    if (item == "inf") {
      out.push_back(kNoThreshold);
    } else {
      std::int64_t v{};
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc{} || ptr != item.data() + item.size() || v <= 0) {
        throw UsageError("invalid threshold '" + std::string(item) +
                         "' (expected positive seconds or inf)");
      }
      out.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw UsageError("threshold list is empty");
  return out;
}

std::string format_threshold(std::int64_t threshold_seconds) {
  return threshold_seconds == kNoThreshold
             ? std::string("inf")
             : std::to_string(threshold_seconds);
}

std::string format_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

void write_results_csv(std::ostream& out,
                       std::span<const SimulationResult> results) {
  out << "threshold_seconds,before,after,reduction_pct,threads_affected,"
         "resets\n";
  for (const SimulationResult& r : results) {
    out << format_threshold(r.threshold_seconds) << ','
        << r.total_prompt_tokens_before << ',' << r.total_prompt_tokens_after
        << ',' << format_pct(r.reduction_fraction) << ',' << r.threads_affected
        << ',' << r.resets_applied << '\n';
  }
}

void write_results_json(std::ostream& out,
                        std::span<const SimulationResult> results) {
  ordered_json arr = ordered_json::array();
  for (const SimulationResult& r : results) {
    ordered_json obj;
    if (r.threshold_seconds == kNoThreshold) {
      obj["threshold_seconds"] = "inf";
    } else {
      obj["threshold_seconds"] = r.threshold_seconds;
    }
    obj["total_prompt_tokens_before"] = r.total_prompt_tokens_before;
    obj["total_prompt_tokens_after"] = r.total_prompt_tokens_after;
    obj["reduction_fraction"] = r.reduction_fraction;
    obj["threads_affected"] = r.threads_affected;
    obj["resets_applied"] = r.resets_applied;
    arr.push_back(std::move(obj));
  }
  out << arr.dump(2) << '\n';
}

std::vector<SimulationResult> read_results_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot open input file: " + path);
  nlohmann::json arr = nlohmann::json::parse(in, nullptr, false);
  if (arr.is_discarded() || !arr.is_array()) {
    throw FatalError("invalid results file: " + path);
  }
  std::vector<SimulationResult> results;
  for (const nlohmann::json& obj : arr) {
    if (!obj.is_object()) throw FatalError("invalid results file: " + path);
    SimulationResult r;
    const nlohmann::json& jt = obj.at("threshold_seconds");
    if (jt.is_string() && jt.get_ref<const std::string&>() == "inf") {
      r.threshold_seconds = kNoThreshold;
    } else if (jt.is_number_integer()) {
      r.threshold_seconds = jt.get<std::int64_t>();
    } else {
      throw FatalError("invalid results file: " + path);
    }
    r.total_prompt_tokens_before =
        obj.at("total_prompt_tokens_before").get<std::uint64_t>();
    r.total_prompt_tokens_after =
        obj.at("total_prompt_tokens_after").get<std::uint64_t>();
    r.reduction_fraction = obj.at("reduction_fraction").get<double>();
    r.threads_affected = obj.at("threads_affected").get<std::uint64_t>();
    r.resets_applied = obj.at("resets_applied").get<std::uint64_t>();
    results.push_back(r);
  }
  return results;
}

}  // namespace tokmem
