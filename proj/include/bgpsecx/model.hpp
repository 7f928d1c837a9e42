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

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bgpsecx/bytes.hpp"
#include "bgpsecx/prefix.hpp"

namespace bgpsecx {

/// Autonomous system number. 2-octet numbers are widened on ingest.
struct Asn {
    std::uint32_t value = 0;

    friend constexpr auto operator<=>(Asn, Asn) = default;
    friend constexpr bool operator==(Asn, Asn) = default;
};

/// Accepts "65001" or "AS65001" (case-insensitive prefix).
std::optional<Asn> parse_asn(std::string_view text) noexcept;
std::string to_string(Asn asn);

enum class SegmentType : std::uint8_t { Set = 1, Sequence = 2 };

struct PathSegment {
    SegmentType type = SegmentType::Sequence;
    std::vector<Asn> asns;

    friend bool operator==(const PathSegment&, const PathSegment&) = default;
};

struct AsPath {
    std::vector<PathSegment> segments;

    bool empty() const noexcept { return segments.empty(); }

    static AsPath sequence(std::initializer_list<std::uint32_t> asns);
    static AsPath sequence(const std::vector<Asn>& asns);

    /// "65001 65002 {65003,65004}"
    std::string str() const;

    friend bool operator==(const AsPath&, const AsPath&) = default;
};

/// Origin(asn) or Indeterminate (std::nullopt).
using OriginResult = std::optional<Asn>;

/// Last ASN of a SEQUENCE-terminated path; Indeterminate for SET-terminated
/// or empty paths.
OriginResult origin_of(const AsPath& path) noexcept;

std::string to_string(const OriginResult& origin);

enum class RouteKind : std::uint8_t { Announce, Withdraw };

struct RouteAnnouncement {
    IpPrefix prefix;
    AsPath as_path;
    Asn announcing_member;
    Bytes next_hop;
    std::int64_t timestamp = 0;
    RouteKind kind = RouteKind::Announce;

    OriginResult origin() const noexcept { return origin_of(as_path); }

    friend bool operator==(const RouteAnnouncement&, const RouteAnnouncement&) = default;
};

/// Short printable-ASCII identifier of an IXP (1 to 32 octets).
class IxpId {
public:
    IxpId() = default;

    /// Throws Error(InvalidIxpId).
    static IxpId make(std::string_view text);
    static bool is_valid(std::string_view text) noexcept;

    const std::string& str() const noexcept { return value_; }

    friend auto operator<=>(const IxpId&, const IxpId&) = default;
    friend bool operator==(const IxpId&, const IxpId&) = default;

private:
    std::string value_;
};

}  // namespace bgpsecx

template <>
struct std::hash<bgpsecx::Asn> {
    std::size_t operator()(bgpsecx::Asn a) const noexcept { return std::hash<std::uint32_t>{}(a.value); }
};
