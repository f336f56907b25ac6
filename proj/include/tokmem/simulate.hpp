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
#ifndef TOKMEM_SIMULATE_HPP_
#define TOKMEM_SIMULATE_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tokmem/memory_model.hpp"
#include "tokmem/threads.hpp"

namespace tokmem {

struct AdjustedMessage {
  std::uint64_t prompt_tokens{};
  std::uint64_t new_prompt_tokens{};
  bool reset_here{};
};

struct AdjustedThread {
  std::string thread_id;
  std::vector<AdjustedMessage> messages;
};

struct SimulationResult {
  std::int64_t threshold_seconds{};
  std::uint64_t total_prompt_tokens_before{};
  std::uint64_t total_prompt_tokens_after{};
  double reduction_fraction{};
  std::uint64_t threads_affected{};
  std::uint64_t resets_applied{};
};

// Walks an annotated thread keeping cumulative removed tokens R. A message
// whose pause strictly exceeds the threshold adds the adjusted size of its
// predecessor to R; every message then carries max(1, prompt - R). Messages
// ahead of the first reset are copied verbatim.
AdjustedThread apply_reset(const Thread& thread,
                           std::int64_t threshold_seconds);

// Independent oracle: the same reset semantics realized through the
// memory-model IdleReset accumulation over the true turn decomposition.
std::vector<std::uint64_t> replay_oracle(std::span<const Turn> turns,
                                         const ModelLimits& limits,
                                         std::int64_t threshold_seconds);

// One result per threshold, in the order given. Orphan-flagged threads are
// skipped unless keep_orphans. Deterministic for any job count.
std::vector<SimulationResult> sweep(std::span<const Thread> threads,
                                    std::span<const std::int64_t> thresholds,
                                    bool keep_orphans = false, int jobs = 1);

// Default sweep: 24 h, 12 h, 6 h, 3 h, 1 h, 30 min.
std::vector<std::int64_t> default_thresholds();

// Comma-separated seconds; "inf" maps to the never-reset sentinel.
std::vector<std::int64_t> parse_thresholds(std::string_view list);
std::string format_threshold(std::int64_t threshold_seconds);

void write_results_csv(std::ostream& out,
                       std::span<const SimulationResult> results);
void write_results_json(std::ostream& out,
                        std::span<const SimulationResult> results);
std::vector<SimulationResult> read_results_json_file(const std::string& path);

// Shared percentage rendering (one decimal place) so every surface that
// prints a reduction shows the same digits.
std::string format_pct(double fraction);

}  // namespace tokmem

#endif  // TOKMEM_SIMULATE_HPP_
