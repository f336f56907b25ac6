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
#ifndef TOKMEM_RNG_HPP_
#define TOKMEM_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace tokmem {

// std::mt19937_64 output is pinned by the standard; the distribution
// transforms here are hand-rolled because the std distribution objects are
// not, and generated fixtures must never shift under a toolchain change.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream seed for (seed, stream); used to give every synthetic
// thread its own engine so parallel generation is schedule-free.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51ED2701ULL));
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Inclusive range via 128-bit multiply; deterministic, bias < 2^-64.
  std::uint64_t uniform_u64(std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t span = hi - lo + 1;
    if (span == 0) return engine_();  // full 64-bit range
    unsigned __int128 wide =
        static_cast<unsigned __int128>(engine_()) * span;
    return lo + static_cast<std::uint64_t>(wide >> 64);
  }

  bool bernoulli(double p) { return next_unit() < p; }

  // Standard normal, Box-Muller; draws a fresh pair per call so consumption
  // is position-independent.
  double normal() {
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // Shifted geometric with support {1, 2, ...} and mean `mean`.
  std::int64_t geometric(double mean) {
    if (!(mean > 1.0)) return 1;
    double p = 1.0 / mean;
    double u = next_unit();
    double v = std::floor(std::log1p(-u) / std::log1p(-p));
    if (!(v >= 0)) v = 0;
    if (v > 1e7) v = 1e7;
    return static_cast<std::int64_t>(v) + 1;
  }

  // exp(ln(median) + sigma * Z): median-parameterized log-normal.
  double lognormal(double median, double sigma) {
    return std::exp(std::log(median) + sigma * normal());
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tokmem

#endif  // TOKMEM_RNG_HPP_
