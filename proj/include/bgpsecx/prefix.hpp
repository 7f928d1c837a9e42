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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace bgpsecx {

enum class Afi : std::uint8_t { IPv4 = 4, IPv6 = 6 };

constexpr unsigned max_length(Afi afi) noexcept { return afi == Afi::IPv4 ? 32 : 128; }
constexpr std::size_t address_size(Afi afi) noexcept { return afi == Afi::IPv4 ? 4 : 16; }

/// An IPv4 or IPv6 prefix in canonical form: every address bit past
/// `length()` is zero. Instances can only be built through the
/// canonicalizing factories, so the invariant always holds.
///
/// Ordering is (afi, address octets, length), i.e. byte-lexicographic.
class IpPrefix {
public:
    /// 0.0.0.0/0
    IpPrefix() = default;

    /// Zeroes the host bits. Throws Error(BadAddress) when the octet count
    /// does not match the family and Error(LengthOutOfRange) when `length`
    /// exceeds 32 / 128.
    static IpPrefix canonical(Afi afi, std::span<const std::uint8_t> address, unsigned length);

    /// Parses CIDR text ("192.0.2.0/24", "2001:db8::/32"). Host bits are
    /// zeroed rather than rejected.
    static IpPrefix parse(std::string_view cidr);
    static std::optional<IpPrefix> try_parse(std::string_view cidr) noexcept;

    Afi afi() const noexcept { return afi_; }
    unsigned length() const noexcept { return length_; }
    std::span<const std::uint8_t> address() const noexcept
    {
        return {address_.data(), address_size(afi_)};
    }

    /// Bit `i` of the address, most significant first.
    bool bit(unsigned i) const noexcept { return (address_[i / 8] >> (7 - i % 8)) & 1; }

    /// The covering prefix of length `len` (len <= length()).
    IpPrefix truncated(unsigned len) const;

    /// Lowercase CIDR text; IPv6 is rendered in compressed form.
    std::string str() const;

    friend auto operator<=>(const IpPrefix&, const IpPrefix&) = default;
    friend bool operator==(const IpPrefix&, const IpPrefix&) = default;

private:
    Afi afi_ = Afi::IPv4;
    std::array<std::uint8_t, 16> address_{};
    std::uint8_t length_ = 0;
};

/// Same as IpPrefix::canonical; named after the operation it implements.
inline IpPrefix canonicalize_prefix(Afi afi, std::span<const std::uint8_t> address, unsigned length)
{
    return IpPrefix::canonical(afi, address, length);
}

/// True iff `outer` and `inner` share a family, outer is no longer than
/// inner, and their first outer.length() bits agree. Reflexive.
bool covers(const IpPrefix& outer, const IpPrefix& inner) noexcept;

/// covers(outer, inner) && outer != inner
inline bool strictly_covers(const IpPrefix& outer, const IpPrefix& inner) noexcept
{
    return outer.length() < inner.length() && covers(outer, inner);
}

std::ostream& operator<<(std::ostream& os, const IpPrefix& p);

/// Renders raw next-hop style address octets (4 or 16) as text; anything
/// else is rendered as hex.
std::string address_to_string(std::span<const std::uint8_t> address);

}  // namespace bgpsecx

template <>
struct std::hash<bgpsecx::IpPrefix> {
    std::size_t operator()(const bgpsecx::IpPrefix& p) const noexcept;
};
