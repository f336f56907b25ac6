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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "tokmem/errors.hpp"
#include "tokmem/rng.hpp"
#include "tokmem/simulate.hpp"

namespace {

using namespace tokmem;

Thread thread_of(std::vector<std::uint64_t> prompts,
                 std::vector<std::int64_t> pauses, bool orphan = false) {
  Thread t;
  t.thread_id = "t";
  t.user_id = "u";
  t.orphan = orphan;
  UtcSeconds ts = 1704067200;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    Message m;
    if (i > 0) {
      std::int64_t gap = pauses.at(i - 1);
      ts += gap;
      m.pause_seconds = gap;
    }
    m.timestamp = ts;
    m.prompt_tokens = prompts[i];
    m.completion_tokens = 1;
    m.message_index = static_cast<std::uint32_t>(i + 1);
    t.messages.push_back(m);
  }
  return t;
}

std::vector<std::uint64_t> new_prompts(const AdjustedThread& a) {
  std::vector<std::uint64_t> out;
  for (const AdjustedMessage& m : a.messages) out.push_back(m.new_prompt_tokens);
  return out;
}

TEST_CASE("a single qualifying pause removes the predecessor's history") {
  Thread t = thread_of({10, 30, 60}, {10, 7200});
  AdjustedThread a = apply_reset(t, 1800);
  CHECK(new_prompts(a) == std::vector<std::uint64_t>{10, 30, 30});
  CHECK_FALSE(a.messages[0].reset_here);
  CHECK_FALSE(a.messages[1].reset_here);
  CHECK(a.messages[2].reset_here);
}

TEST_CASE("no qualifying pause leaves the thread untouched") {
  Thread t = thread_of({10, 30, 60}, {10, 7200});
  AdjustedThread a = apply_reset(t, kNoThreshold);
  CHECK(new_prompts(a) == std::vector<std::uint64_t>{10, 30, 60});
  for (const AdjustedMessage& m : a.messages) CHECK_FALSE(m.reset_here);
}

TEST_CASE("consecutive resets subtract adjusted, not original, values") {
  Thread t = thread_of({10, 30, 60, 100}, {10, 7200, 7200});
  AdjustedThread a = apply_reset(t, 1800);
  CHECK(new_prompts(a) == std::vector<std::uint64_t>{10, 30, 30, 40});
}

TEST_CASE("a pause exactly at the threshold does not reset") {
  Thread t = thread_of({10, 30}, {1800});
  AdjustedThread a = apply_reset(t, 1800);
  CHECK(new_prompts(a) == std::vector<std::uint64_t>{10, 30});
  a = apply_reset(t, 1799);
  CHECK(new_prompts(a) == std::vector<std::uint64_t>{10, 20});
}

TEST_CASE("adjusted prompts stay within [1, original]") {
  // The limit-plateau case: prompt equals its predecessor, so subtraction
  // would hit zero without the floor.
  Thread t = thread_of({10, 50, 50}, {7200, 7200});
  AdjustedThread a = apply_reset(t, 1800);
  for (const AdjustedMessage& m : a.messages) {
    CHECK(m.new_prompt_tokens >= 1);
    CHECK(m.new_prompt_tokens <= m.prompt_tokens);
  }
  CHECK(new_prompts(a) == std::vector<std::uint64_t>{10, 40, 1});
}

TEST_CASE("replay oracle degenerate cases") {
  ModelLimits limits;
  limits.template_tokens = 3;
  limits.token_limit = 100;
  std::vector<Turn> one(1);
  one[0].user_tokens = 9;
  CHECK(replay_oracle(one, limits, 1800) ==
        std::vector<std::uint64_t>{12});

  std::vector<Turn> turns(3);
  for (std::size_t i = 0; i < 3; ++i) {
    turns[i].user_tokens = 5;
    turns[i].completion_tokens = 7;
    if (i > 0) turns[i].pause_before_seconds = 10000;
  }
  CHECK(replay_oracle(turns, limits, kNoThreshold) ==
        accumulate(turns, limits, MemoryPolicy::full_history()).prompt_tokens);
}

// Clamp-free synthetic threads: observed prompts come from FullHistory with
// T=0 and zero completions, so the reset arithmetic and the oracle replay
// must agree exactly.
TEST_CASE("apply_reset equals the replay oracle on clamp-free threads") {
  Sampler rng(20260101);
  const std::vector<std::int64_t> thresholds = {0, 100, 1800, 86400};
  for (int iter = 0; iter < 300; ++iter) {
    std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_u64(0, 14));
    std::vector<Turn> turns(n);
    std::vector<std::uint64_t> prompts;
    std::vector<std::int64_t> pauses;
    std::uint64_t hist = 0;
    for (std::size_t i = 0; i < n; ++i) {
      turns[i].user_tokens = rng.uniform_u64(1, 300);
      turns[i].completion_tokens = 0;
      if (i > 0) {
        std::int64_t gap = static_cast<std::int64_t>(rng.uniform_u64(1, 200000));
        turns[i].pause_before_seconds = gap;
        pauses.push_back(gap);
      }
      prompts.push_back(hist + turns[i].user_tokens);
      hist += turns[i].user_tokens;
    }
    Thread t = thread_of(prompts, pauses);
    for (std::int64_t theta : thresholds) {
      AdjustedThread a = apply_reset(t, theta);
      std::vector<std::uint64_t> oracle = replay_oracle(turns, {}, theta);
      CHECK(new_prompts(a) == oracle);
    }
  }
}

TEST_CASE("sweep with an infinite threshold changes nothing") {
  std::vector<Thread> threads = {thread_of({10, 30, 60}, {10, 7200})};
  std::vector<std::int64_t> ths = {kNoThreshold};
  std::vector<SimulationResult> results = sweep(threads, ths);
  REQUIRE(results.size() == 1);
  CHECK(results[0].total_prompt_tokens_before == 100);
  CHECK(results[0].total_prompt_tokens_after == 100);
  CHECK(results[0].reduction_fraction == 0.0);
  CHECK(results[0].threads_affected == 0);
  CHECK(results[0].resets_applied == 0);
}

TEST_CASE("sweep totals equal the sum of per-thread adjustments") {
  std::vector<Thread> threads = {
      thread_of({10, 30, 60}, {10, 7200}),
      thread_of({5, 15}, {60}),
      thread_of({10, 30, 60, 100}, {10, 7200, 7200}),
  };
  std::vector<std::int64_t> ths = {1800};
  std::vector<SimulationResult> results = sweep(threads, ths);
  REQUIRE(results.size() == 1);
  std::uint64_t before = 0, after = 0, resets = 0, affected = 0;
  for (const Thread& t : threads) {
    AdjustedThread a = apply_reset(t, 1800);
    bool hit = false;
    for (const AdjustedMessage& m : a.messages) {
      before += m.prompt_tokens;
      after += m.new_prompt_tokens;
      if (m.reset_here) {
        ++resets;
        hit = true;
      }
    }
    if (hit) ++affected;
  }
  CHECK(results[0].total_prompt_tokens_before == before);
  CHECK(results[0].total_prompt_tokens_after == after);
  CHECK(results[0].resets_applied == resets);
  CHECK(results[0].threads_affected == affected);
  CHECK(results[0].reduction_fraction ==
        doctest::Approx(1.0 - double(after) / double(before)).epsilon(1e-12));
}

TEST_CASE("orphan threads are skipped unless kept") {
  std::vector<Thread> threads = {
      thread_of({10, 30}, {7200}),
      thread_of({10, 30}, {7200}, /*orphan=*/true),
  };
  std::vector<std::int64_t> ths = {1800};
  std::vector<SimulationResult> skip = sweep(threads, ths, false);
  std::vector<SimulationResult> keep = sweep(threads, ths, true);
  CHECK(skip[0].total_prompt_tokens_before == 40);
  CHECK(keep[0].total_prompt_tokens_before == 80);
  CHECK(skip[0].threads_affected == 1);
  CHECK(keep[0].threads_affected == 2);
}

TEST_CASE("an empty thread list produces zeroed results") {
  std::vector<Thread> none;
  std::vector<std::int64_t> ths = {1800, 3600};
  std::vector<SimulationResult> results = sweep(none, ths);
  REQUIRE(results.size() == 2);
  for (const SimulationResult& r : results) {
    CHECK(r.total_prompt_tokens_before == 0);
    CHECK(r.total_prompt_tokens_after == 0);
    CHECK(r.reduction_fraction == 0.0);
  }
}

TEST_CASE("tighter thresholds never reduce less") {
  Sampler rng(99);
  std::vector<Thread> threads;
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_u64(0, 9));
    std::vector<std::uint64_t> prompts;
    std::vector<std::int64_t> pauses;
    std::uint64_t hist = 0;
    for (std::size_t j = 0; j < n; ++j) {
      hist += rng.uniform_u64(1, 500);
      prompts.push_back(hist);
      if (j > 0) {
        pauses.push_back(static_cast<std::int64_t>(rng.uniform_u64(1, 200000)));
      }
    }
    threads.push_back(thread_of(prompts, pauses));
  }
  std::vector<std::int64_t> ths = default_thresholds();
  std::vector<SimulationResult> results = sweep(threads, ths);
  REQUIRE(results.size() == 6);
  for (std::size_t i = 1; i < results.size(); ++i) {
    CHECK(results[i].threshold_seconds < results[i - 1].threshold_seconds);
    CHECK(results[i].reduction_fraction >=
          results[i - 1].reduction_fraction);
    CHECK(results[i].total_prompt_tokens_before ==
          results[0].total_prompt_tokens_before);
  }
}

TEST_CASE("sweep results do not depend on the job count") {
  Sampler rng(123);
  std::vector<Thread> threads;
  for (int i = 0; i < 57; ++i) {
    std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_u64(0, 9));
    std::vector<std::uint64_t> prompts;
    std::vector<std::int64_t> pauses;
    std::uint64_t hist = 0;
    for (std::size_t j = 0; j < n; ++j) {
      hist += rng.uniform_u64(1, 500);
      prompts.push_back(hist);
      if (j > 0) {
        pauses.push_back(static_cast<std::int64_t>(rng.uniform_u64(1, 100000)));
      }
    }
    threads.push_back(thread_of(prompts, pauses));
  }
  std::vector<std::int64_t> ths = {86400, 1800};
  std::vector<SimulationResult> serial = sweep(threads, ths, false, 1);
  std::vector<SimulationResult> parallel = sweep(threads, ths, false, 8);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].total_prompt_tokens_before ==
          parallel[i].total_prompt_tokens_before);
    CHECK(serial[i].total_prompt_tokens_after ==
          parallel[i].total_prompt_tokens_after);
    CHECK(serial[i].reduction_fraction == parallel[i].reduction_fraction);
    CHECK(serial[i].threads_affected == parallel[i].threads_affected);
    CHECK(serial[i].resets_applied == parallel[i].resets_applied);
  }
}

TEST_CASE("threshold lists parse with the inf sentinel") {
  std::vector<std::int64_t> ths = parse_thresholds("86400,1800,inf");
  REQUIRE(ths.size() == 3);
  CHECK(ths[0] == 86400);
  CHECK(ths[1] == 1800);
  CHECK(ths[2] == kNoThreshold);
  CHECK(default_thresholds() ==
        std::vector<std::int64_t>{86400, 43200, 21600, 10800, 3600, 1800});
  CHECK_THROWS_AS(parse_thresholds(""), UsageError);
  CHECK_THROWS_AS(parse_thresholds("10,x"), UsageError);
  CHECK_THROWS_AS(parse_thresholds("0"), UsageError);
  CHECK_THROWS_AS(parse_thresholds("-5"), UsageError);
  CHECK(format_threshold(1800) == "1800");
  CHECK(format_threshold(kNoThreshold) == "inf");
}

TEST_CASE("results render to the documented CSV schema") {
  SimulationResult r;
  r.threshold_seconds = 1800;
  r.total_prompt_tokens_before = 1000;
  r.total_prompt_tokens_after = 809;
  r.reduction_fraction = 0.191;
  r.threads_affected = 3;
  r.resets_applied = 4;
  SimulationResult inf = r;
  inf.threshold_seconds = kNoThreshold;
  inf.total_prompt_tokens_after = 1000;
  inf.reduction_fraction = 0.0;
  inf.threads_affected = 0;
  inf.resets_applied = 0;
  std::vector<SimulationResult> results = {r, inf};
  std::ostringstream out;
  write_results_csv(out, results);
  CHECK(out.str() ==
        "threshold_seconds,before,after,reduction_pct,threads_affected,resets\n"
        "1800,1000,809,19.1,3,4\n"
        "inf,1000,1000,0.0,0,0\n");
}

TEST_CASE("results JSON round-trips through a file") {
  std::vector<Thread> threads = {thread_of({10, 30, 60}, {10, 7200})};
  std::vector<std::int64_t> ths = {1800, kNoThreshold};
  std::vector<SimulationResult> results = sweep(threads, ths);

  std::string path = "test_results_roundtrip.json";
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    write_results_json(out, results);
  }
  std::vector<SimulationResult> back = read_results_json_file(path);
  std::remove(path.c_str());
  REQUIRE(back.size() == results.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].threshold_seconds == results[i].threshold_seconds);
    CHECK(back[i].total_prompt_tokens_before ==
          results[i].total_prompt_tokens_before);
    CHECK(back[i].total_prompt_tokens_after ==
          results[i].total_prompt_tokens_after);
    CHECK(back[i].threads_affected == results[i].threads_affected);
    CHECK(back[i].resets_applied == results[i].resets_applied);
  }
}

TEST_CASE("format_pct renders one decimal place") {
  CHECK(format_pct(0.191) == "19.1");
  CHECK(format_pct(0.0) == "0.0");
  CHECK(format_pct(0.022) == "2.2");
  CHECK(format_pct(1.0) == "100.0");
}

}  // namespace
