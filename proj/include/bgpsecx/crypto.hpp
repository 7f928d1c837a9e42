/*
 * Copyright 2026 The BGPSecX Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "bgpsecx/bytes.hpp"

namespace bgpsecx {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteView data);
/// Throws Error(Io) if the file cannot be read.
Digest sha256_file(const std::filesystem::path& path);
Digest hmac_sha256(ByteView key, ByteView data);
/// Constant-time comparison.
bool digest_equal(ByteView a, ByteView b) noexcept;

}  // namespace bgpsecx
