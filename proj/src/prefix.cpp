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

#include "bgpsecx/prefix.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <charconv>
#include <ostream>

#include "bgpsecx/bytes.hpp"
#include "bgpsecx/error.hpp"

namespace bgpsecx {

IpPrefix IpPrefix::canonical(Afi afi, std::span<const std::uint8_t> address, unsigned length)
{
    if (address.size() != address_size(afi)) {
        throw Error(Errc::BadAddress, "expected " + std::to_string(address_size(afi)) +
                                          " address octets, got " + std::to_string(address.size()));
    }
    if (length > max_length(afi)) {
        throw Error(Errc::LengthOutOfRange,
                    "length " + std::to_string(length) + " exceeds " + std::to_string(max_length(afi)));
    }
    IpPrefix p;
    p.afi_ = afi;
    p.length_ = static_cast<std::uint8_t>(length);
    std::copy(address.begin(), address.end(), p.address_.begin());
    const unsigned full = length / 8;
    const unsigned rem = length % 8;
    if (full < 16) {
        if (rem != 0) {
            p.address_[full] &= static_cast<std::uint8_t>(0xFF << (8 - rem));
            std::fill(p.address_.begin() + full + 1, p.address_.end(), 0);
        } else {
            std::fill(p.address_.begin() + full, p.address_.end(), 0);
        }
    }
    return p;
}

std::optional<IpPrefix> IpPrefix::try_parse(std::string_view cidr) noexcept
{
    const auto slash = cidr.find('/');
    if (slash == std::string_view::npos || slash == 0) return std::nullopt;
    const std::string_view len_text = cidr.substr(slash + 1);
    if (len_text.empty() || len_text.size() > 3) return std::nullopt;
    unsigned length = 0;
    auto [ptr, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), length);
    if (ec != std::errc{} || ptr != len_text.data() + len_text.size()) return std::nullopt;

    const std::string addr_text(cidr.substr(0, slash));
    std::array<std::uint8_t, 16> buf{};
    Afi afi;
    if (addr_text.find(':') != std::string::npos) {
        if (inet_pton(AF_INET6, addr_text.c_str(), buf.data()) != 1) return std::nullopt;
        afi = Afi::IPv6;
    } else {
        if (inet_pton(AF_INET, addr_text.c_str(), buf.data()) != 1) return std::nullopt;
        afi = Afi::IPv4;
    }
    if (length > max_length(afi)) return std::nullopt;
    return canonical(afi, std::span(buf.data(), address_size(afi)), length);
}

IpPrefix IpPrefix::parse(std::string_view cidr)
{
    if (auto p = try_parse(cidr)) return *p;
    // Distinguish an over-long length from general garbage for callers.
    const auto slash = cidr.find('/');
    if (slash != std::string_view::npos) {
        unsigned length = 0;
        auto tail = cidr.substr(slash + 1);
        auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), length);
        if (ec == std::errc{} && ptr == tail.data() + tail.size()) {
            const bool v6 = cidr.substr(0, slash).find(':') != std::string_view::npos;
            if (length > (v6 ? 128u : 32u)) {
                throw Error(Errc::LengthOutOfRange, "prefix '" + std::string(cidr) + "'");
            }
        }
    }
    throw Error(Errc::BadAddress, "cannot parse prefix '" + std::string(cidr) + "'");
}

IpPrefix IpPrefix::truncated(unsigned len) const
{
    return canonical(afi_, address(), std::min<unsigned>(len, length_));
}

std::string IpPrefix::str() const
{
    return address_to_string(address()) + "/" + std::to_string(length_);
}

bool covers(const IpPrefix& outer, const IpPrefix& inner) noexcept
{
    if (outer.afi() != inner.afi() || outer.length() > inner.length()) return false;
    const unsigned len = outer.length();
    const auto a = outer.address();
    const auto b = inner.address();
    const unsigned full = len / 8;
    if (!std::equal(a.begin(), a.begin() + full, b.begin())) return false;
    const unsigned rem = len % 8;
    if (rem == 0) return true;
    const auto mask = static_cast<std::uint8_t>(0xFF << (8 - rem));
    return (a[full] & mask) == (b[full] & mask);
}

std::ostream& operator<<(std::ostream& os, const IpPrefix& p) { return os << p.str(); }

std::string address_to_string(std::span<const std::uint8_t> address)
{
    char text[INET6_ADDRSTRLEN] = {};
    if (address.size() == 4) {
        inet_ntop(AF_INET, address.data(), text, sizeof text);
        return text;
    }
    if (address.size() == 16) {
        inet_ntop(AF_INET6, address.data(), text, sizeof text);
        return text;
    }
    return to_hex(address);
}

}  // namespace bgpsecx

std::size_t std::hash<bgpsecx::IpPrefix>::operator()(const bgpsecx::IpPrefix& p) const noexcept
{
    // FNV-1a over family, length and address octets.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint8_t b) {
        h ^= b;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint8_t>(p.afi()));
    mix(static_cast<std::uint8_t>(p.length()));
    for (auto b : p.address()) mix(b);
    return static_cast<std::size_t>(h);
}
