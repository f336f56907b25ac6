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
#include "tokmem/time_utc.hpp"

#include <chrono>
#include <cstdio>

namespace tokmem {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

std::optional<UtcSeconds> parse_utc(std::string_view text) {
  // Fixed layout up to seconds: YYYY-MM-DDTHH:MM:SS
  if (text.size() < 20) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':') {
    return std::nullopt;
  }
  std::string_view ys = text.substr(0, 4), mos = text.substr(5, 2),
                   ds = text.substr(8, 2), hs = text.substr(11, 2),
                   mis = text.substr(14, 2), ss = text.substr(17, 2);
  if (!all_digits(ys) || !all_digits(mos) || !all_digits(ds) ||
      !all_digits(hs) || !all_digits(mis) || !all_digits(ss)) {
    return std::nullopt;
  }

  std::size_t pos = 19;
  if (text[pos] == '.') {
    ++pos;
    std::size_t frac_begin = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == frac_begin) return std::nullopt;  // "." with no digits
  }
  std::string_view zone = text.substr(pos);
  if (zone != "Z" && zone != "+00:00") return std::nullopt;

  int year = to_int(ys), month = to_int(mos), day = to_int(ds);
  int hour = to_int(hs), minute = to_int(mis), second = to_int(ss);
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;

  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{(unsigned)month},
                     std::chrono::day{(unsigned)day}};
  if (!ymd.ok()) return std::nullopt;
  sys_days sd{ymd};
  return sd.time_since_epoch().count() * INT64_C(86400) + hour * 3600 +
         minute * 60 + second;
}

std::string format_utc(UtcSeconds t) {
  std::int64_t day_count = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --day_count;
  }
  using namespace std::chrono;
  year_month_day ymd{sys_days{days(static_cast<days::rep>(day_count))}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                (int)ymd.year(), (unsigned)ymd.month(), (unsigned)ymd.day(),
                (int)(rem / 3600), (int)(rem / 60 % 60), (int)(rem % 60));
  return buf;
}

}  // namespace tokmem
