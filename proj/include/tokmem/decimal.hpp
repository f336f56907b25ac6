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
#ifndef TOKMEM_DECIMAL_HPP_
#define TOKMEM_DECIMAL_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace tokmem {

// Fixed-point decimal: value = digits * 10^-scale. Currency math stays in
// integers end to end; no binary floating point is involved.
class Decimal {
 public:
  Decimal() = default;
  Decimal(__int128 digits, int scale) : digits_(digits), scale_(scale) {}

  // "0.50", "12", "4.32741"; optional leading minus. Throws FatalError on
  // anything else.
  static Decimal parse(std::string_view text);
  static Decimal from_int(std::int64_t value) { return Decimal(value, 0); }

  // this * n, keeping the scale.
  Decimal times(std::uint64_t n) const;
  // Shift the decimal point right (divide by 10^k exactly, growing scale).
  Decimal shift_down(int k) const;
  // Exact sum; operands are brought to a common scale.
  Decimal plus(const Decimal& other) const;
  // Drop trailing fractional zeros, but never below min_scale.
  Decimal trimmed(int min_scale) const;

  int scale() const { return scale_; }
  bool is_zero() const { return digits_ == 0; }
  std::string str() const;

  friend bool operator==(const Decimal& a, const Decimal& b);

 private:
  __int128 digits_{};
  int scale_{};
};

}  // namespace tokmem

#endif  // TOKMEM_DECIMAL_HPP_
