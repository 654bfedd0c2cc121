// Copyright 2026 The ponas-pool Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ponas {

using Digest = std::array<std::uint8_t, 32>;

/// Incremental SHA-256 with big-endian framing helpers.
class Hasher {
public:
  Hasher();
  ~Hasher();
  Hasher(const Hasher&) = delete;
  Hasher& operator=(const Hasher&) = delete;

  Hasher& bytes(const void* data, std::size_t n);
  Hasher& u32(std::uint32_t v);
  Hasher& u64(std::uint64_t v);
  Hasher& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
  /// u32 length prefix, then the bytes.
  Hasher& str(std::string_view s);
  Hasher& digest(const Digest& d) { return bytes(d.data(), d.size()); }

  Digest finish();

private:
  void* ctx_;
};

Digest sha256(std::string_view data);

std::string to_hex(const Digest& d);

/// Throws std::invalid_argument unless `hex` is 64 hex digits.
Digest digest_from_hex(std::string_view hex);

} // namespace ponas
