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

// AVX2 variants, 4 x 64-bit lanes. Compiled with -mavx2 in this translation
// unit only; kernels.cpp dispatches here after a runtime CPUID check.
// Comparisons are signed (AVX2 has no unsigned 64-bit compare), valid under
// the < 2^62 value contract stated in kernels.hpp.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "tokmem/kernels.hpp"

namespace tokmem::kernels {

namespace {

inline std::uint64_t hsum(__m256i v) {
  alignas(32) std::uint64_t lane[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane), v);
  return lane[0] + lane[1] + lane[2] + lane[3];
}

std::uint64_t sum_u64_avx2(const std::uint64_t* x, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_epi64(
        acc, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i)));
  }
  std::uint64_t s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

void add_u64_avx2(const std::uint64_t* a, const std::uint64_t* b,
                  std::uint64_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_add_epi64(va, vb));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

// Block-wise inclusive scan with a scalar carry between blocks.
std::uint64_t exclusive_scan_u64_avx2(const std::uint64_t* x,
                                      std::uint64_t* out, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  std::uint64_t carry = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i));
    // s1 = v + (v slid left one lane)
    __m256i t1 = _mm256_permute4x64_epi64(v, _MM_SHUFFLE(2, 1, 0, 0));
    t1 = _mm256_blend_epi32(t1, zero, 0x03);
    __m256i s1 = _mm256_add_epi64(v, t1);
    // inc = s1 + (s1 slid left two lanes) -> inclusive scan of the block
    __m256i t2 = _mm256_permute4x64_epi64(s1, _MM_SHUFFLE(1, 0, 0, 0));
    t2 = _mm256_blend_epi32(t2, zero, 0x0F);
    __m256i inc = _mm256_add_epi64(s1, t2);
    // exclusive = carry + (inc slid left one lane)
    __m256i exc = _mm256_permute4x64_epi64(inc, _MM_SHUFFLE(2, 1, 0, 0));
    exc = _mm256_blend_epi32(exc, zero, 0x03);
    exc = _mm256_add_epi64(exc, _mm256_set1_epi64x((long long)carry));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), exc);
    carry += (std::uint64_t)_mm256_extract_epi64(inc, 3);
  }
  for (; i < n; ++i) {
    out[i] = carry;
    carry += x[i];
  }
  return carry;
}

void offset_min_clamp_u64_avx2(const std::uint64_t* hist,
                               const std::uint64_t* user, std::uint64_t offset,
                               std::uint64_t limit, std::uint64_t* out,
                               std::size_t n) {
  const __m256i voff = _mm256_set1_epi64x((long long)offset);
  const __m256i vlim = _mm256_set1_epi64x((long long)limit);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i vh = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(hist + i));
    __m256i vu = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(user + i));
    __m256i s = _mm256_add_epi64(_mm256_add_epi64(vh, vu), voff);
    __m256i over = _mm256_cmpgt_epi64(s, vlim);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_blendv_epi8(s, vlim, over));
  }
  for (; i < n; ++i) {
    std::uint64_t v = offset + hist[i] + user[i];
    out[i] = v < limit ? v : limit;
  }
}

void reset_adjust_i64_avx2(const std::int64_t* p, const std::int64_t* base,
                           std::int64_t* out, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  const __m256i one = _mm256_set1_epi64x(1);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i vp = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(base + i));
    __m256i ident = _mm256_cmpgt_epi64(zero, vb);  // base < 0
    __m256i diff = _mm256_sub_epi64(vp, vb);
    __m256i low = _mm256_cmpgt_epi64(one, diff);  // diff < 1
    __m256i adj = _mm256_blendv_epi8(diff, one, low);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_blendv_epi8(adj, vp, ident));
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

std::uint64_t count_gt_i64_avx2(const std::int64_t* x, std::int64_t threshold,
                                std::size_t n) {
  const __m256i vt = _mm256_set1_epi64x(threshold);
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i));
    // cmpgt lanes are all-ones (-1); subtracting accumulates +1 per hit
    acc = _mm256_sub_epi64(acc, _mm256_cmpgt_epi64(v, vt));
  }
  std::uint64_t c = hsum(acc);
  for (; i < n; ++i) c += x[i] > threshold ? 1 : 0;
  return c;
}

const Implementation kAvx2{
    "avx2",
    sum_u64_avx2,
    add_u64_avx2,
    exclusive_scan_u64_avx2,
    offset_min_clamp_u64_avx2,
    reset_adjust_i64_avx2,
    count_gt_i64_avx2,
};

}  // namespace

const Implementation* avx2() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

}  // namespace tokmem::kernels

#endif  // x86_64
