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
#include "tokmem/decimal.hpp"

#include <algorithm>

#include "tokmem/errors.hpp"

namespace tokmem {

namespace {

// int128 holds ~38 decimal digits; cap inputs well below so products with a
// token count (<= ~13 digits) cannot overflow.
constexpr int kMaxParsedDigits = 24;

__int128 pow10_128(int k) {
  __int128 v = 1;
  for (int i = 0; i < k; ++i) v *= 10;
  return v;
}

void append_u128(std::string& out, unsigned __int128 v) {
  char buf[48];
  int n = 0;
  do {
    buf[n++] = static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  } while (v != 0);
  while (n > 0) out.push_back(buf[--n]);
}

}  // namespace

Decimal Decimal::parse(std::string_view text) {
  std::string_view rest = text;
  bool negative = false;
  if (!rest.empty() && rest.front() == '-') {
    negative = true;
    rest.remove_prefix(1);
  }
  std::size_t dot = rest.find('.');
  std::string_view whole = rest.substr(0, dot);
  std::string_view frac =
      dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
  if (whole.empty() || (dot != std::string_view::npos && frac.empty())) {
    throw FatalError("invalid decimal '" + std::string(text) + "'");
  }
  if (whole.size() + frac.size() > kMaxParsedDigits) {
    throw FatalError("decimal has too many digits: '" + std::string(text) +
                     "'");
  }
  __int128 digits = 0;
  for (std::string_view part : {whole, frac}) {
    for (char c : part) {
      if (c < '0' || c > '9') {
        throw FatalError("invalid decimal '" + std::string(text) + "'");
      }
      digits = digits * 10 + (c - '0');
    }
  }
  if (negative) digits = -digits;
  return Decimal(digits, static_cast<int>(frac.size()));
}

Decimal Decimal::times(std::uint64_t n) const {
  __int128 product;
  if (__builtin_mul_overflow(digits_, static_cast<__int128>(n), &product)) {
    throw FatalError("decimal overflow");
  }
  return Decimal(product, scale_);
}

Decimal Decimal::shift_down(int k) const {
  return Decimal(digits_, scale_ + k);
}

Decimal Decimal::plus(const Decimal& other) const {
  int scale = std::max(scale_, other.scale_);
  __int128 a = digits_ * pow10_128(scale - scale_);
  __int128 b = other.digits_ * pow10_128(scale - other.scale_);
  __int128 sum;
  if (__builtin_add_overflow(a, b, &sum)) {
    throw FatalError("decimal overflow");
  }
  return Decimal(sum, scale);
}

Decimal Decimal::trimmed(int min_scale) const {
  __int128 digits = digits_;
  int scale = scale_;
  while (scale > min_scale && digits % 10 == 0) {
    digits /= 10;
    --scale;
  }
  return Decimal(digits, scale);
}

std::string Decimal::str() const {
  unsigned __int128 mag = digits_ < 0
                              ? static_cast<unsigned __int128>(-(digits_ + 1)) + 1
                              : static_cast<unsigned __int128>(digits_);
  std::string body;
  append_u128(body, mag);
  if (scale_ > 0) {
    if (body.size() <= static_cast<std::size_t>(scale_)) {
      body.insert(0, static_cast<std::size_t>(scale_) + 1 - body.size(), '0');
    }
    body.insert(body.size() - static_cast<std::size_t>(scale_), 1, '.');
  }
  if (digits_ < 0) body.insert(0, 1, '-');
  return body;
}

bool operator==(const Decimal& a, const Decimal& b) {
  int scale = std::max(a.scale_, b.scale_);
  return a.digits_ * pow10_128(scale - a.scale_) ==
         b.digits_ * pow10_128(scale - b.scale_);
}

}  // namespace tokmem
