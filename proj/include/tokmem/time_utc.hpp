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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tokmem {

// Seconds since the Unix epoch. Log timestamps are second-resolution UTC.
using UtcSeconds = std::int64_t;

// Parses a strict ISO-8601 UTC instant: YYYY-MM-DDTHH:MM:SS[.frac](Z|+00:00).
// Fractional seconds are truncated. Anything else (missing zone, non-UTC
// offset, out-of-range calendar fields) yields nullopt.
std::optional<UtcSeconds> parse_utc(std::string_view text);

// Canonical form: YYYY-MM-DDTHH:MM:SSZ.
std::string format_utc(UtcSeconds t);

}  // namespace tokmem
