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
#include <vector>

#include "doctest.h"
#include "tokmem/kernels.hpp"
#include "tokmem/rng.hpp"

namespace {

using tokmem::Sampler;
using namespace tokmem::kernels;

// Vector sizes chosen to cover empty input, sub-lane tails, exact lane
// multiples, and larger blocks for every backend width.
const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8,
                                         9, 15, 16, 17, 64, 100, 1023};

std::vector<std::uint64_t> random_u64(Sampler& rng, std::size_t n,
                                      std::uint64_t hi) {
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = rng.uniform_u64(0, hi);
  return v;
}

TEST_CASE("scalar sum and scan match hand results") {
  const Implementation& impl = scalar();
  std::vector<std::uint64_t> x = {3, 1, 4, 1, 5};
  CHECK(impl.sum_u64(x.data(), x.size()) == 14);
  CHECK(impl.sum_u64(x.data(), 0) == 0);

  std::vector<std::uint64_t> out(x.size());
  std::uint64_t total = impl.exclusive_scan_u64(x.data(), out.data(), x.size());
  CHECK(total == 14);
  CHECK(out == std::vector<std::uint64_t>{0, 3, 4, 8, 9});
}

TEST_CASE("scalar offset_min_clamp applies offset then limit") {
  const Implementation& impl = scalar();
  std::vector<std::uint64_t> hist = {0, 10, 100};
  std::vector<std::uint64_t> user = {5, 5, 5};
  std::vector<std::uint64_t> out(3);
  impl.offset_min_clamp_u64(hist.data(), user.data(), 7, 50, out.data(), 3);
  CHECK(out == std::vector<std::uint64_t>{12, 22, 50});
}

TEST_CASE("scalar reset_adjust honors the no-base sentinel and clamp") {
  const Implementation& impl = scalar();
  std::vector<std::int64_t> p = {10, 30, 60, 100, 5};
  std::vector<std::int64_t> base = {kNoBase, kNoBase, 30, 30, 30};
  std::vector<std::int64_t> out(p.size());
  impl.reset_adjust_i64(p.data(), base.data(), out.data(), p.size());
  CHECK(out == std::vector<std::int64_t>{10, 30, 30, 70, 1});
}

TEST_CASE("scalar count_gt is strict") {
  const Implementation& impl = scalar();
  std::vector<std::int64_t> x = {1, 2, 3, 3, 4};
  CHECK(impl.count_gt_i64(x.data(), 3, x.size()) == 1);
  CHECK(impl.count_gt_i64(x.data(), 0, x.size()) == 5);
  CHECK(impl.count_gt_i64(x.data(), 4, x.size()) == 0);
}

TEST_CASE("every available backend matches scalar lane for lane") {
  const Implementation& ref = scalar();
  std::vector<const Implementation*> impls = available();
  REQUIRE(!impls.empty());
  CHECK(impls.front() == &ref);

  Sampler rng(20260822);
  const std::uint64_t big = (UINT64_C(1) << 61);
  for (std::size_t n : kSizes) {
    std::vector<std::uint64_t> a = random_u64(rng, n, big / 2);
    std::vector<std::uint64_t> b = random_u64(rng, n, big / 2);
    std::vector<std::int64_t> p(n);
    std::vector<std::int64_t> base(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<std::int64_t>(rng.uniform_u64(0, 1u << 20));
      base[i] = rng.bernoulli(0.3)
                    ? kNoBase
                    : static_cast<std::int64_t>(rng.uniform_u64(0, 1u << 20));
    }
    std::uint64_t offset = rng.uniform_u64(0, 1u << 16);
    std::uint64_t limit = rng.uniform_u64(1, big);
    std::int64_t threshold = static_cast<std::int64_t>(
        rng.uniform_u64(0, 1u << 20));

    std::vector<std::uint64_t> ref_add(n), ref_scan(n), ref_clamp(n);
    std::vector<std::int64_t> ref_adjust(n);
    std::uint64_t ref_sum = ref.sum_u64(a.data(), n);
    ref.add_u64(a.data(), b.data(), ref_add.data(), n);
    std::uint64_t ref_total = ref.exclusive_scan_u64(a.data(), ref_scan.data(), n);
    ref.offset_min_clamp_u64(a.data(), b.data(), offset, limit,
                             ref_clamp.data(), n);
    ref.reset_adjust_i64(p.data(), base.data(), ref_adjust.data(), n);
    std::uint64_t ref_count = ref.count_gt_i64(p.data(), threshold, n);

    for (const Implementation* impl : impls) {
      CAPTURE(impl->name);
      CAPTURE(n);
      std::vector<std::uint64_t> got_add(n), got_scan(n), got_clamp(n);
      std::vector<std::int64_t> got_adjust(n);
      CHECK(impl->sum_u64(a.data(), n) == ref_sum);
      impl->add_u64(a.data(), b.data(), got_add.data(), n);
      CHECK(got_add == ref_add);
      CHECK(impl->exclusive_scan_u64(a.data(), got_scan.data(), n) == ref_total);
      CHECK(got_scan == ref_scan);
      impl->offset_min_clamp_u64(a.data(), b.data(), offset, limit,
                                 got_clamp.data(), n);
      CHECK(got_clamp == ref_clamp);
      impl->reset_adjust_i64(p.data(), base.data(), got_adjust.data(), n);
      CHECK(got_adjust == ref_adjust);
      CHECK(impl->count_gt_i64(p.data(), threshold, n) == ref_count);
    }
  }
}

TEST_CASE("active backend is one of the available backends") {
  const Implementation& act = active();
  bool found = false;
  for (const Implementation* impl : available()) {
    if (impl == &act) found = true;
  }
  CHECK(found);
}

}  // namespace
