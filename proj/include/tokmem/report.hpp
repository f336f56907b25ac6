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
#ifndef TOKMEM_REPORT_HPP_
#define TOKMEM_REPORT_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tokmem/impact.hpp"
#include "tokmem/simulate.hpp"
#include "tokmem/threads.hpp"

namespace tokmem {

struct IndexStats {
  std::uint32_t message_index{};
  std::uint64_t n{};
  std::uint64_t min{};
  double median{};       // mean of the two middles for even n
  std::uint64_t p90{};   // nearest-rank, an observed value
  std::uint64_t max{};
};

// Per-message-index prompt-token statistics over all threads; indices with
// no observations are omitted. Counts are non-increasing in the index.
std::vector<IndexStats> token_distribution(std::span<const Thread> threads);

struct PauseHistogram {
  std::uint64_t underflow{};          // pauses in [0, 1)
  std::vector<double> edges;          // 10^(k/bins_per_decade), ascending
  std::vector<std::uint64_t> counts;  // counts[i] covers [edges[i], edges[i+1])
};

// Logarithmic binning of every annotated pause.
PauseHistogram pause_histogram(std::span<const Thread> threads,
                               int bins_per_decade);

void write_token_distribution_csv(std::ostream& out,
                                  std::span<const IndexStats> stats);
void write_pause_histogram_csv(std::ostream& out, const PauseHistogram& hist);

struct SummaryInputs {
  std::size_t thread_count{};
  std::size_t orphan_count{};
  std::size_t message_count{};
  std::span<const SimulationResult> results;
  std::span<const ImpactEstimate> impacts;  // aligned with results; may be empty
  bool default_sweep{};
};

// Human-readable run summary in markdown. Reduction percentages reuse the
// exact digits of the results table.
void write_summary_md(std::ostream& out, const SummaryInputs& inputs);

}  // namespace tokmem

#endif  // TOKMEM_REPORT_HPP_
