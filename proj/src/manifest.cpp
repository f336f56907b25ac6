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
#include "tokmem/manifest.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "tokmem/errors.hpp"
#include "tokmem/sha256.hpp"
#include "tokmem/version.hpp"

namespace tokmem {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json file_entry(const std::string& path) {
  ordered_json entry;
  entry["path"] = std::filesystem::path(path).filename().string();
  entry["sha256"] = sha256_file_hex(path);
  return entry;
}

}  // namespace

UtcSeconds manifest_clock() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    std::int64_t v{};
    auto [ptr, ec] = std::from_chars(epoch, epoch + std::strlen(epoch), v);
    if (ec == std::errc{} && *ptr == '\0') return v;
  }
  return static_cast<UtcSeconds>(std::time(nullptr));
}

void write_manifest(const std::string& out_dir, const RunManifest& manifest) {
  ordered_json doc;
  doc["tool"] = kToolName;
  doc["version"] = kVersion;
  doc["stage"] = manifest.stage;
  doc["created_utc"] = format_utc(manifest_clock());
  ordered_json inputs = ordered_json::array();
  for (const std::string& path : manifest.inputs) {
    inputs.push_back(file_entry(path));
  }
  doc["inputs"] = std::move(inputs);
  ordered_json outputs = ordered_json::array();
  for (const std::string& path : manifest.outputs) {
    outputs.push_back(file_entry(path));
  }
  doc["outputs"] = std::move(outputs);
  ordered_json config = ordered_json::object();
  for (const auto& [key, value] : manifest.config) config[key] = value;
  doc["config"] = std::move(config);

  std::filesystem::path target =
      std::filesystem::path(out_dir) / (manifest.stage + ".manifest.json");
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw FatalError("cannot write manifest: " + target.string());
    }
    out << doc.dump(2) << '\n';
    if (!out.flush()) {
      throw FatalError("cannot write manifest: " + target.string());
    }
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace tokmem
