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

#include <cstddef>
#include <cstdint>
#include <vector>

// Data-parallel integer kernels behind the accounting pipeline: token-sum
// reductions, exclusive history scans, clamped prompt evaluation, reset
// adjustment, and threshold counting. A scalar reference implementation is
// always present; AVX2 and NEON variants are selected at runtime when the
// host supports them and must be lane-for-lane equivalent to scalar.
//
// Value contract: every input value and every intermediate sum stays below
// 2^62. Callers enforce this by capping per-record token counts on ingest
// (kMaxTokenCount) and clamping model token limits (kMaxTokenLimit). Within
// that domain signed and unsigned 64-bit arithmetic agree, which the vector
// variants rely on.

namespace tokmem::kernels {

inline constexpr std::uint64_t kMaxTokenLimit = (UINT64_C(1) << 62) - 1;

// Output sentinel used by reset_adjust_i64: a negative base means "no reset
// seen yet, copy the prompt through unchanged".
inline constexpr std::int64_t kNoBase = -1;

struct Implementation {
  const char* name;

  // Plain reduction.
  std::uint64_t (*sum_u64)(const std::uint64_t* x, std::size_t n);

  // out[i] = a[i] + b[i]
  void (*add_u64)(const std::uint64_t* a, const std::uint64_t* b,
                  std::uint64_t* out, std::size_t n);

  // out[i] = x[0] + ... + x[i-1]; returns the total sum.
  std::uint64_t (*exclusive_scan_u64)(const std::uint64_t* x,
                                      std::uint64_t* out, std::size_t n);

  // out[i] = min(limit, offset + hist[i] + user[i])
  void (*offset_min_clamp_u64)(const std::uint64_t* hist,
                               const std::uint64_t* user, std::uint64_t offset,
                               std::uint64_t limit, std::uint64_t* out,
                               std::size_t n);

  // out[i] = base[i] < 0 ? p[i] : max(1, p[i] - base[i])
  void (*reset_adjust_i64)(const std::int64_t* p, const std::int64_t* base,
                           std::int64_t* out, std::size_t n);

  // Number of elements strictly greater than threshold.
  std::uint64_t (*count_gt_i64)(const std::int64_t* x, std::int64_t threshold,
                                std::size_t n);
};

// Always available.
const Implementation& scalar();

// Null when the backend is not compiled in or the CPU lacks the feature.
const Implementation* avx2();
const Implementation* neon();

// Best available backend. TOKMEM_KERNELS={scalar,avx2,neon} forces one;
// requesting an unavailable backend falls back to scalar with a warning on
// stderr (printed once).
const Implementation& active();

// All usable backends, scalar first. For equivalence tests.
std::vector<const Implementation*> available();

}  // namespace tokmem::kernels
