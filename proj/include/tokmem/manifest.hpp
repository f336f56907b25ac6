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
#ifndef TOKMEM_MANIFEST_HPP_
#define TOKMEM_MANIFEST_HPP_

#include <map>
#include <string>
#include <vector>

#include "tokmem/time_utc.hpp"

namespace tokmem {

// Reproducibility sidecar written next to every stage artifact: tool
// version, input/output digests, and the flags that produced them.
struct RunManifest {
  std::string stage;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> config;
};

// Writes <stage>.manifest.json into out_dir. The created timestamp honors
// SOURCE_DATE_EPOCH so archived runs can be byte-stable.
void write_manifest(const std::string& out_dir, const RunManifest& manifest);

// Current wall clock unless SOURCE_DATE_EPOCH overrides it.
UtcSeconds manifest_clock();

}  // namespace tokmem

#endif  // TOKMEM_MANIFEST_HPP_
