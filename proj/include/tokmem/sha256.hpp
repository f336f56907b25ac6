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
#ifndef TOKMEM_SHA256_HPP_
#define TOKMEM_SHA256_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace tokmem {

// FIPS 180-4 SHA-256; used for manifest digests only, not security.
class Sha256 {
 public:
  Sha256();
  void update(const void* data, std::size_t len);
  // Finalizes and returns the lowercase hex digest; the object is spent.
  std::string hex_digest();

 private:
  void process_block(const std::uint8_t* block);

  std::uint32_t state_[8];
  std::uint8_t buffer_[64];
  std::uint64_t total_bytes_{};
  std::size_t buffered_{};
};

std::string sha256_hex(std::string_view data);
// Throws FatalError when the file cannot be read.
std::string sha256_file_hex(const std::string& path);

}  // namespace tokmem

#endif  // TOKMEM_SHA256_HPP_
