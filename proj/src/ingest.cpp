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
#include "tokmem/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "tokmem/errors.hpp"

namespace tokmem {

namespace {

using ordered_json = nlohmann::ordered_json;

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    std::size_t len;
    unsigned cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char cc = s[i + k];
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (len == 2 && cp < 0x80) return false;  // overlong
    if (len == 3 && cp < 0x800) return false;
    if (len == 4 && cp < 0x10000) return false;
    if (cp >= 0xD800 && cp <= 0xDFFF) return false;  // surrogate
    if (cp > 0x10FFFF) return false;
    i += len;
  }
  return true;
}

enum class CountParse { Ok, Negative, Invalid, OutOfRange };

CountParse parse_count(std::string_view s, std::uint64_t& value) {
  if (s.empty()) return CountParse::Invalid;
  std::string_view digits = s;
  bool negative = false;
  if (digits[0] == '-') {
    negative = true;
    digits.remove_prefix(1);
  }
  if (digits.empty()) return CountParse::Invalid;
  for (char c : digits) {
    if (c < '0' || c > '9') return CountParse::Invalid;
  }
  if (negative) return CountParse::Negative;
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec == std::errc::result_out_of_range) return CountParse::OutOfRange;
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    return CountParse::Invalid;
  }
  if (value > kMaxTokenCount) return CountParse::OutOfRange;
  return CountParse::Ok;
}

const char* count_reason(CountParse cp) {
  switch (cp) {
    case CountParse::Negative:
      return "negative token count";
    case CountParse::OutOfRange:
      return "token count out of range";
    default:
      return "invalid token count";
  }
}

struct CsvRow {
  std::uint64_t start_line{};
  std::vector<std::string> fields;
  bool blank{};  // physical line with no characters at all
};

// RFC-4180-style scan over the whole buffer. Quoted fields may span lines;
// line accounting is by physical '\n'.
std::vector<CsvRow> scan_csv(std::string_view data) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool any_content = false;  // non-terminator chars seen in current row
  std::uint64_t line = 1;
  row.start_line = 1;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&](std::uint64_t next_line) {
    end_field();
    row.blank = !any_content && row.fields.size() == 1 && row.fields[0].empty();
    rows.push_back(std::move(row));
    row = CsvRow{};
    row.start_line = next_line;
    any_content = false;
  };

  std::size_t i = 0;
  while (i < data.size()) {
    char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
        ++i;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        any_content = true;
        ++i;
        break;
      case ',':
        end_field();
        any_content = true;
        ++i;
        break;
      case '\r':
        if (i + 1 < data.size() && data[i + 1] == '\n') {
          ++i;  // swallow, '\n' handles the break
        } else {
          field.push_back(c);
          any_content = true;
          ++i;
        }
        break;
      case '\n':
        ++line;
        end_row(line);
        ++i;
        break;
      default:
        field.push_back(c);
        any_content = true;
        ++i;
        break;
    }
  }
  if (any_content || !field.empty() || !row.fields.empty() || in_quotes) {
    end_row(line + 1);
  }
  return rows;
}

ParseResult parse_csv(std::string_view data, const ColumnMap& columns) {
  if (data.substr(0, 3) == "\xEF\xBB\xBF") data.remove_prefix(3);

  ParseResult result;
  std::vector<CsvRow> rows = scan_csv(data);

  std::size_t first = 0;
  while (first < rows.size() && rows[first].blank) ++first;
  if (first == rows.size()) {
    throw FatalError("missing CSV header");
  }
  const std::vector<std::string>& header = rows[first].fields;
  auto col_index = [&](const std::string& name) {
    std::size_t idx = header.size();
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) {
        if (idx != header.size()) {
          throw FatalError("duplicate CSV column '" + name + "'");
        }
        idx = k;
      }
    }
    if (idx == header.size()) {
      throw FatalError("CSV header is missing column '" + name + "'");
    }
    return idx;
  };
  std::size_t ts_col = col_index(columns.datetime);
  std::size_t user_col = col_index(columns.user);
  std::size_t prompt_col = col_index(columns.prompt);
  std::size_t completion_col = col_index(columns.completion);

  for (std::size_t r = first + 1; r < rows.size(); ++r) {
    CsvRow& row = rows[r];
    if (row.blank) continue;
    auto reject = [&](const char* reason) {
      result.report.rejected_rows.push_back({row.start_line, reason});
    };
    if (row.fields.size() != header.size()) {
      reject("wrong field count");
      continue;
    }
    auto ts = parse_utc(row.fields[ts_col]);
    if (!ts) {
      reject("invalid timestamp");
      continue;
    }
    if (!valid_utf8(row.fields[user_col])) {
      reject("invalid UTF-8");
      continue;
    }
    std::uint64_t prompt = 0, completion = 0;
    CountParse pc = parse_count(row.fields[prompt_col], prompt);
    if (pc != CountParse::Ok) {
      reject(count_reason(pc));
      continue;
    }
    CountParse cc = parse_count(row.fields[completion_col], completion);
    if (cc != CountParse::Ok) {
      reject(count_reason(cc));
      continue;
    }
    result.records.push_back({*ts, std::move(row.fields[user_col]), prompt,
                              completion, row.start_line});
  }
  return result;
}

ParseResult parse_jsonl(std::string_view data, const ColumnMap& columns) {
  ParseResult result;
  std::uint64_t line = 0;
  std::size_t pos = 0;
  while (pos <= data.size()) {
    std::size_t nl = data.find('\n', pos);
    std::string_view raw = data.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line;
    pos = nl == std::string_view::npos ? data.size() + 1 : nl + 1;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    bool blank = raw.find_first_not_of(" \t") == std::string_view::npos;
    if (blank) continue;

    auto reject = [&](const std::string& reason) {
      result.report.rejected_rows.push_back({line, reason});
    };
    nlohmann::json obj =
        nlohmann::json::parse(raw, /*cb=*/nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) {
      reject("invalid JSON");
      continue;
    }
    if (!obj.is_object()) {
      reject("not a JSON object");
      continue;
    }
    const char* missing = nullptr;
    for (const std::string* key :
         {&columns.datetime, &columns.user, &columns.prompt,
          &columns.completion}) {
      if (!obj.contains(*key)) {
        missing = key->c_str();
        break;
      }
    }
    if (missing != nullptr) {
      reject(std::string("missing field ") + missing);
      continue;
    }
    const nlohmann::json& jts = obj.at(columns.datetime);
    if (!jts.is_string()) {
      reject("invalid timestamp");
      continue;
    }
    auto ts = parse_utc(jts.get_ref<const std::string&>());
    if (!ts) {
      reject("invalid timestamp");
      continue;
    }
    const nlohmann::json& juser = obj.at(columns.user);
    if (!juser.is_string()) {
      reject("invalid user_id");
      continue;
    }
    auto token_field = [&](const std::string& key, std::uint64_t& out) {
      const nlohmann::json& jv = obj.at(key);
      if (jv.is_number_unsigned()) {
        out = jv.get<std::uint64_t>();
        return out > kMaxTokenCount ? CountParse::OutOfRange : CountParse::Ok;
      }
      if (jv.is_number_integer()) return CountParse::Negative;  // < 0 here
      return CountParse::Invalid;
    };
    std::uint64_t prompt = 0, completion = 0;
    CountParse pc = token_field(columns.prompt, prompt);
    if (pc != CountParse::Ok) {
      reject(count_reason(pc));
      continue;
    }
    CountParse cc = token_field(columns.completion, completion);
    if (cc != CountParse::Ok) {
      reject(count_reason(cc));
      continue;
    }
    result.records.push_back(
        {*ts, juser.get<std::string>(), prompt, completion, line});
  }
  return result;
}

void finish_report(ParseResult& result) {
  ValidationReport& rep = result.report;
  rep.row_count = result.records.size();
  std::unordered_set<std::string_view> users;
  for (const LogRecord& r : result.records) {
    users.insert(r.user_id);
    if (!rep.time_span) {
      rep.time_span = {r.timestamp, r.timestamp};
    } else {
      rep.time_span->first = std::min(rep.time_span->first, r.timestamp);
      rep.time_span->second = std::max(rep.time_span->second, r.timestamp);
    }
  }
  rep.user_count = users.size();
}

void csv_field(std::ostream& out, std::string_view field) {
  bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

LogFormat parse_format_tag(std::string_view tag) {
  if (tag == "csv") return LogFormat::Csv;
  if (tag == "jsonl") return LogFormat::Jsonl;
  throw UsageError("unknown format tag '" + std::string(tag) +
                   "' (expected csv or jsonl)");
}

std::string_view format_tag(LogFormat format) {
  return format == LogFormat::Csv ? "csv" : "jsonl";
}

ParseResult parse_log(std::string_view data, LogFormat format,
                      const ColumnMap& columns) {
  ParseResult result = format == LogFormat::Csv ? parse_csv(data, columns)
                                                : parse_jsonl(data, columns);
  finish_report(result);
  return result;
}

ParseResult parse_log(std::istream& in, LogFormat format,
                      const ColumnMap& columns) {
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw FatalError("unreadable input stream");
  std::string data = std::move(buf).str();
  return parse_log(std::string_view(data), format, columns);
}

ParseResult parse_log_file(const std::string& path, LogFormat format,
                           const ColumnMap& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot open input file: " + path);
  return parse_log(in, format, columns);
}

void sort_records(std::vector<LogRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const LogRecord& a, const LogRecord& b) {
                     if (a.user_id != b.user_id) return a.user_id < b.user_id;
                     if (a.timestamp != b.timestamp)
                       return a.timestamp < b.timestamp;
                     return a.source_line < b.source_line;
                   });
}

void write_csv(std::ostream& out, std::span<const LogRecord> records,
               const ColumnMap& columns) {
  out << columns.datetime << ',' << columns.user << ',' << columns.prompt
      << ',' << columns.completion << '\n';
  for (const LogRecord& r : records) {
    out << format_utc(r.timestamp) << ',';
    csv_field(out, r.user_id);
    out << ',' << r.prompt_tokens << ',' << r.completion_tokens << '\n';
  }
}

void write_jsonl(std::ostream& out, std::span<const LogRecord> records,
                 const ColumnMap& columns) {
  for (const LogRecord& r : records) {
    ordered_json obj;
    obj[columns.datetime] = format_utc(r.timestamp);
    obj[columns.user] = r.user_id;
    obj[columns.prompt] = r.prompt_tokens;
    obj[columns.completion] = r.completion_tokens;
    out << obj.dump(-1, ' ', false,
                    nlohmann::json::error_handler_t::replace)
        << '\n';
  }
}

}  // namespace tokmem
