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

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>

#include <unistd.h>

#include "bgpsecx/bytes.hpp"
#include "bgpsecx/prefix.hpp"

namespace bgpsecx::test {

inline std::filesystem::path data_dir() { return BGPSECX_TEST_DATA_DIR; }

inline Bytes hex(std::string_view text) { return from_hex(text); }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(std::string_view tag)
{
    static std::uint64_t counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("bgpsecx-" + std::string(tag) + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Random prefix of the given family with a length in [min_len, max_len].
inline IpPrefix random_prefix(std::mt19937_64& rng, Afi afi, unsigned min_len, unsigned max_len)
{
    std::uint8_t addr[16];
    for (auto& b : addr) b = static_cast<std::uint8_t>(rng());
    const unsigned len = min_len + static_cast<unsigned>(rng() % (max_len - min_len + 1));
    return IpPrefix::canonical(afi, std::span<const std::uint8_t>(addr, address_size(afi)), len);
}

/// Prefix of length `len` inside `outer` (len >= outer.length()).
inline IpPrefix random_subprefix(std::mt19937_64& rng, const IpPrefix& outer, unsigned len)
{
    std::uint8_t addr[16] = {};
    const auto base = outer.address();
    for (std::size_t i = 0; i < base.size(); ++i) addr[i] = base[i];
    for (unsigned bit = outer.length(); bit < len; ++bit) {
        if (rng() & 1) addr[bit / 8] |= static_cast<std::uint8_t>(0x80 >> (bit % 8));
    }
    return IpPrefix::canonical(outer.afi(), std::span<const std::uint8_t>(addr, base.size()), len);
}

}  // namespace bgpsecx::test
