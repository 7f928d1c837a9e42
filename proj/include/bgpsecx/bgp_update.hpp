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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bgpsecx/bytes.hpp"
#include "bgpsecx/model.hpp"
#include "bgpsecx/prefix.hpp"

namespace bgpsecx {

inline constexpr std::size_t kBgpHeaderSize = 19;
inline constexpr std::uint8_t kBgpUpdate = 2;

enum class OriginAttr : std::uint8_t { Igp = 0, Egp = 1, Incomplete = 2 };

namespace attr {
inline constexpr std::uint8_t kOrigin = 1;
inline constexpr std::uint8_t kAsPath = 2;
inline constexpr std::uint8_t kNextHop = 3;
inline constexpr std::uint8_t kMpReachNlri = 14;
inline constexpr std::uint8_t kMpUnreachNlri = 15;
}  // namespace attr

/// Decoded UPDATE. IPv6 unicast routes carried in MP_REACH_NLRI /
/// MP_UNREACH_NLRI are folded into `nlri` / `withdrawn`; their next hop is
/// kept in `mp_next_hop`.
struct BgpUpdate {
    std::vector<IpPrefix> withdrawn;
    std::optional<OriginAttr> origin_attr;
    std::optional<AsPath> as_path;
    std::optional<Bytes> next_hop;
    std::optional<Bytes> mp_next_hop;
    std::vector<IpPrefix> nlri;
    /// Attributes (and non-unicast MP families) skipped by length.
    std::size_t skipped_attributes = 0;

    bool end_of_rib() const noexcept { return withdrawn.empty() && nlri.empty() && !as_path; }

    friend bool operator==(const BgpUpdate&, const BgpUpdate&) = default;
};

/// Path attributes as they appear in an UPDATE or an MRT RIB entry.
struct PathAttributes {
    std::optional<OriginAttr> origin_attr;
    std::optional<AsPath> as_path;
    std::optional<Bytes> next_hop;
    std::optional<Bytes> mp_next_hop;
    std::vector<IpPrefix> mp_nlri;
    std::vector<IpPrefix> mp_withdrawn;
    std::size_t skipped = 0;
};

struct AttributeContext {
    /// Octets per ASN in AS_PATH: 4, or 2 for legacy sessions.
    unsigned asn_size = 4;
    /// MRT RIB entries carry an abbreviated MP_REACH_NLRI holding only the
    /// next hop.
    bool rib_entry = false;
};

/// Throws Error(MalformedAttribute) / Error(MalformedNlri).
PathAttributes parse_path_attributes(ByteView data, const AttributeContext& ctx);

/// Decodes a run of (length, prefix octets) NLRI entries. Throws
/// Error(MalformedNlri).
std::vector<IpPrefix> decode_nlri(ByteView data, Afi afi);

/// Parses a complete BGP message that must be an UPDATE. Throws
/// Error(TruncatedMessage | BadMarker | NotAnUpdate | MalformedAttribute |
/// MalformedNlri).
BgpUpdate parse_update(ByteView bytes, unsigned asn_size = 4);

/// Inverse of parse_update for the fields the parser keeps.
Bytes encode_update(const BgpUpdate& update, unsigned asn_size = 4);

}  // namespace bgpsecx
