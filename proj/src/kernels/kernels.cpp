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
#include "tokmem/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace tokmem::kernels {

namespace {

std::uint64_t sum_u64_scalar(const std::uint64_t* x, std::size_t n) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

void add_u64_scalar(const std::uint64_t* a, const std::uint64_t* b,
                    std::uint64_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

std::uint64_t exclusive_scan_u64_scalar(const std::uint64_t* x,
                                        std::uint64_t* out, std::size_t n) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = acc;
    acc += x[i];
  }
  return acc;
}

void offset_min_clamp_u64_scalar(const std::uint64_t* hist,
                                 const std::uint64_t* user,
                                 std::uint64_t offset, std::uint64_t limit,
                                 std::uint64_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t v = offset + hist[i] + user[i];
    out[i] = v < limit ? v : limit;
  }
}

void reset_adjust_i64_scalar(const std::int64_t* p, const std::int64_t* base,
                             std::int64_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (base[i] < 0) {
      out[i] = p[i];
    } else {
      std::int64_t d = p[i] - base[i];
      out[i] = d > 1 ? d : 1;
    }
  }
}

std::uint64_t count_gt_i64_scalar(const std::int64_t* x, std::int64_t threshold,
                                  std::size_t n) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += x[i] > threshold ? 1 : 0;
  return c;
}

const Implementation kScalar{
    "scalar",
    sum_u64_scalar,
    add_u64_scalar,
    exclusive_scan_u64_scalar,
    offset_min_clamp_u64_scalar,
    reset_adjust_i64_scalar,
    count_gt_i64_scalar,
};

const Implementation* pick_active() {
  const char* forced = std::getenv("TOKMEM_KERNELS");
  if (forced != nullptr) {
    if (std::strcmp(forced, "scalar") == 0) return &kScalar;
    if (std::strcmp(forced, "avx2") == 0) {
      if (const Implementation* impl = avx2()) return impl;
      std::fprintf(stderr,
                   "tokmem: TOKMEM_KERNELS=avx2 requested but unavailable; "
                   "using scalar kernels\n");
      return &kScalar;
    }
    if (std::strcmp(forced, "neon") == 0) {
      if (const Implementation* impl = neon()) return impl;
      std::fprintf(stderr,
                   "tokmem: TOKMEM_KERNELS=neon requested but unavailable; "
                   "using scalar kernels\n");
      return &kScalar;
    }
    std::fprintf(stderr,
                 "tokmem: unknown TOKMEM_KERNELS value '%s'; using scalar "
                 "kernels\n",
                 forced);
    return &kScalar;
  }
  if (const Implementation* impl = avx2()) return impl;
  if (const Implementation* impl = neon()) return impl;
  return &kScalar;
}

}  // namespace

const Implementation& scalar() { return kScalar; }

const Implementation& active() {
  static const Implementation* chosen = pick_active();
  return *chosen;
}

std::vector<const Implementation*> available() {
  std::vector<const Implementation*> impls{&kScalar};
  if (const Implementation* impl = avx2()) impls.push_back(impl);
  if (const Implementation* impl = neon()) impls.push_back(impl);
  return impls;
}

#if !defined(__x86_64__) && !defined(_M_X64)
const Implementation* avx2() { return nullptr; }
#endif

#if !defined(__aarch64__)
const Implementation* neon() { return nullptr; }
#endif

}  // namespace tokmem::kernels
