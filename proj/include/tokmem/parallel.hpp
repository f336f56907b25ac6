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

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tokmem {

// Number of chunks parallel_chunks will use for the same (n, jobs). Lets
// callers pre-size per-chunk accumulators.
inline std::size_t chunk_count(std::size_t n, int jobs) {
  std::size_t want = jobs < 1 ? 1 : static_cast<std::size_t>(jobs);
  return std::min(want, n);
}

// Static partitioning of [0, n) into at most `jobs` contiguous chunks, one
// worker thread per chunk. fn(chunk_index, begin, end) runs once per chunk.
// The chunk layout depends only on n and jobs, so callers that merge partial
// results in chunk-index order get schedule-independent output. The first
// exception thrown by any worker is rethrown after all workers join.
template <typename Fn>
void parallel_chunks(std::size_t n, int jobs, Fn&& fn) {
  std::size_t chunks = chunk_count(n, jobs);
  if (n == 0) return;
  if (chunks <= 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(chunks);
  std::size_t per = n / chunks;
  std::size_t rem = n % chunks;
  std::size_t begin = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    std::size_t end = begin + per + (c < rem ? 1 : 0);
    workers.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
    begin = end;
  }
  for (std::thread& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tokmem
