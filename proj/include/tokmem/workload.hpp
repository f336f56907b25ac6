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
#ifndef TOKMEM_WORKLOAD_HPP_
#define TOKMEM_WORKLOAD_HPP_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tokmem/memory_model.hpp"
#include "tokmem/records.hpp"
#include "tokmem/rng.hpp"
#include "tokmem/time_utc.hpp"

namespace tokmem {

struct DistSpec {
  enum class Kind { Constant, Uniform, Geometric, LogNormal };

  Kind kind{Kind::Constant};
  double value{};            // constant
  double min{}, max{};       // uniform (inclusive)
  double mean{};             // geometric, support >= 1
  double median{}, sigma{};  // log-normal

  static DistSpec constant(double v);
  static DistSpec uniform(double lo, double hi);
  static DistSpec geometric(double mean);
  static DistSpec log_normal(double median, double sigma);

  // Rounded sample clamped to >= floor_value.
  std::int64_t sample_int(Sampler& rng, std::int64_t floor_value) const;
};

struct GeneratorConfig {
  std::uint64_t seed{42};
  std::uint64_t n_users{};
  std::uint64_t n_threads{};
  DistSpec messages_per_thread;
  DistSpec user_tokens_dist;
  DistSpec completion_tokens_dist;
  std::uint64_t template_tokens{};
  std::uint64_t token_limit{std::numeric_limits<std::uint64_t>::max()};
  std::uint64_t title_delta{9};
  DistSpec intra_pause_dist;
  double topic_change_rate{};
  DistSpec topic_pause_dist;
  UtcSeconds window_start{};
  std::int64_t window_seconds{30LL * 86400};
  double irregular_rate{};  // perturb: fraction of threads made non-monotone
  bool adversarial{};       // collide same-user thread starts on purpose
};

// Marginals follow the shapes described for the studied corpus (geometric
// thread lengths with a 15-20 message tail, log-normal token counts, heavy
// multi-day pause tail). Qualitative only; parameters are not measurements.
GeneratorConfig paper_like_preset();

GeneratorConfig load_generator_config_file(const std::string& path);
void write_generator_config(std::ostream& out, const GeneratorConfig& config);

// One line of the truth sidecar, aligned 1:1 with the emitted record list
// (record_ordinal is the 1-based position).
struct TruthRecord {
  std::uint64_t record_ordinal{};
  std::string thread_id;
  std::string user_id;
  std::uint32_t message_index{};  // 0 for helper records
  bool helper{};
  bool topic_change{};
  bool irregular{};
  std::uint64_t user_tokens{};
  std::uint64_t completion_tokens{};
  std::int64_t pause_before_seconds{-1};  // -1 when absent
};

struct TruthThread {
  std::string thread_id;
  std::string user_id;
  std::vector<Turn> turns;
  bool irregular{};
  // Flat record positions for in-process consumers; not serialized.
  std::vector<std::size_t> message_record_index;
  std::size_t helper_record_index{};
};

struct GroundTruth {
  std::vector<TruthRecord> records;
  std::vector<TruthThread> threads;
};

// Samples per-thread content from per-thread seed streams, lays out per-user
// timelines so no two same-user records collide (except each helper with its
// thread start), and emits records in timeline order together with aligned
// ground truth. Adversarial mode instead forces same-user start collisions.
std::pair<std::vector<LogRecord>, GroundTruth> generate(
    const GeneratorConfig& config, int jobs = 1);

// Makes irregular_rate of the multi-message threads non-monotone by lowering
// one mid-thread prompt below its predecessor; marks them in truth.
void perturb(std::vector<LogRecord>& records, GroundTruth& truth,
             const GeneratorConfig& config);

void write_truth(std::ostream& out, const GroundTruth& truth);
GroundTruth read_truth_file(const std::string& path);

}  // namespace tokmem

#endif  // TOKMEM_WORKLOAD_HPP_
