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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "bgpsecx/model.hpp"
#include "bgpsecx/prefix.hpp"

namespace bgpsecx {

struct WhitelistEntry {
    Asn member;
    std::set<IpPrefix> allowed;
    /// When present, more-specifics of an allowed prefix pass up to this length.
    std::optional<unsigned> allow_more_specifics_up_to;

    friend bool operator==(const WhitelistEntry&, const WhitelistEntry&) = default;
};

/// Prefixes each IXP member is expected to announce. One entry per member.
struct Whitelist {
    std::string source_ixp;
    std::uint64_t version = 0;
    std::map<Asn, WhitelistEntry> entries;

    const WhitelistEntry* find(Asn member) const
    {
        auto it = entries.find(member);
        return it == entries.end() ? nullptr : &it->second;
    }

    friend bool operator==(const Whitelist&, const Whitelist&) = default;
};

enum class FilterState : std::uint8_t { Pass, Violation, NoPolicy };

std::string_view to_string(FilterState s) noexcept;

struct FilterResult {
    FilterState state = FilterState::NoPolicy;
    /// The allowed prefix that authorized a Pass (the most specific one).
    std::optional<IpPrefix> matched_entry;

    friend bool operator==(const FilterResult&, const FilterResult&) = default;
};

/// Parses the JSON whitelist document:
///   {"ixp": "...", "version": 3,
///    "members": [{"asn": 65010, "prefixes": ["203.0.113.0/24"],
///                 "allow_more_specifics_up_to": 25}]}
/// Throws Error(SchemaError) naming the offending JSON path, or
/// Error(DuplicateMember).
Whitelist load_whitelist(std::string_view document);
/// Throws Error(Io) if the file cannot be read.
Whitelist load_whitelist_file(const std::filesystem::path& path);

/// Canonical JSON rendering (members by ASN, prefixes sorted).
std::string dump_whitelist(const Whitelist& wl);

/// NoPolicy if the announcing member has no entry. Pass if an allowed
/// prefix equals the announced prefix, or covers it and the announced length
/// is within allow_more_specifics_up_to. Violation otherwise.
FilterResult check_whitelist(const Whitelist& wl, const RouteAnnouncement& ann);

/// Per-member union of allowed prefixes. The merged more-specifics bound is
/// the largest bound present, raised if needed so it still admits every
/// merged prefix length; absent if no input carries one.
Whitelist merge_cluster(std::span<const Whitelist> whitelists);

}  // namespace bgpsecx
