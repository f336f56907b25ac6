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

// NEON variants, 2 x 64-bit lanes (aarch64 baseline). The exclusive scan is
// carry-bound at 2 lanes and stays scalar. Same < 2^62 value contract as the
// other backends.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "tokmem/kernels.hpp"

namespace tokmem::kernels {

namespace {

std::uint64_t sum_u64_neon(const std::uint64_t* x, std::size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_u64(acc, vld1q_u64(x + i));
  std::uint64_t s = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) s += x[i];
  return s;
}

void add_u64_neon(const std::uint64_t* a, const std::uint64_t* b,
                  std::uint64_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_u64(out + i, vaddq_u64(vld1q_u64(a + i), vld1q_u64(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

std::uint64_t exclusive_scan_u64_neon(const std::uint64_t* x,
                                      std::uint64_t* out, std::size_t n) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = acc;
    acc += x[i];
  }
  return acc;
}

void offset_min_clamp_u64_neon(const std::uint64_t* hist,
                               const std::uint64_t* user, std::uint64_t offset,
                               std::uint64_t limit, std::uint64_t* out,
                               std::size_t n) {
  const int64x2_t voff = vdupq_n_s64((std::int64_t)offset);
  const int64x2_t vlim = vdupq_n_s64((std::int64_t)limit);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    int64x2_t vh = vreinterpretq_s64_u64(vld1q_u64(hist + i));
    int64x2_t vu = vreinterpretq_s64_u64(vld1q_u64(user + i));
    int64x2_t s = vaddq_s64(vaddq_s64(vh, vu), voff);
    uint64x2_t over = vcgtq_s64(s, vlim);
    int64x2_t r = vbslq_s64(over, vlim, s);
    vst1q_u64(out + i, vreinterpretq_u64_s64(r));
  }
  for (; i < n; ++i) {
    std::uint64_t v = offset + hist[i] + user[i];
    out[i] = v < limit ? v : limit;
  }
}

void reset_adjust_i64_neon(const std::int64_t* p, const std::int64_t* base,
                           std::int64_t* out, std::size_t n) {
  const int64x2_t zero = vdupq_n_s64(0);
  const int64x2_t one = vdupq_n_s64(1);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    int64x2_t vp = vld1q_s64(p + i);
    int64x2_t vb = vld1q_s64(base + i);
    uint64x2_t ident = vcgtq_s64(zero, vb);  // base < 0
    int64x2_t diff = vsubq_s64(vp, vb);
    uint64x2_t low = vcgtq_s64(one, diff);  // diff < 1
    int64x2_t adj = vbslq_s64(low, one, diff);
    vst1q_s64(out + i, vbslq_s64(ident, vp, adj));
  }
  for (; i < n; ++i) {
    if (base[i] < 0) {
      out[i] = p[i];
    } else {
      std::int64_t d = p[i] - base[i];
      out[i] = d > 1 ? d : 1;
    }
  }
}

std::uint64_t count_gt_i64_neon(const std::int64_t* x, std::int64_t threshold,
                                std::size_t n) {
  const int64x2_t vt = vdupq_n_s64(threshold);
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // mask lanes are all-ones; subtracting accumulates +1 per hit
    acc = vsubq_u64(acc, vcgtq_s64(vld1q_s64(x + i), vt));
  }
  std::uint64_t c = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) c += x[i] > threshold ? 1 : 0;
  return c;
}

const Implementation kNeon{
    "neon",
    sum_u64_neon,
    add_u64_neon,
    exclusive_scan_u64_neon,
    offset_min_clamp_u64_neon,
    reset_adjust_i64_neon,
    count_gt_i64_neon,
};

}  // namespace

const Implementation* neon() { return &kNeon; }

}  // namespace tokmem::kernels

#endif  // __aarch64__
