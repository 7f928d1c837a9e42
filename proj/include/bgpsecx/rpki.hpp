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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bgpsecx/model.hpp"
#include "bgpsecx/prefix.hpp"

namespace bgpsecx {

/// Route Origin Authorization as exported by a validating RPKI cache.
struct Roa {
    IpPrefix prefix;
    unsigned max_length = 0;
    Asn origin;
    std::string trust_anchor;

    friend auto operator<=>(const Roa&, const Roa&) = default;
    friend bool operator==(const Roa&, const Roa&) = default;
};

/// Immutable ROA set indexed by a binary trie on prefix bits (one trie per
/// address family). Duplicate rows are collapsed; identical ROAs from
/// different trust anchors are kept.
class RoaStore {
public:
    RoaStore();
    /// Throws Error(SchemaError) if any ROA breaks
    /// prefix.length <= max_length <= family bound.
    explicit RoaStore(std::vector<Roa> roas);

    std::size_t size() const noexcept { return roas_.size(); }
    /// All ROAs in sorted order.
    std::span<const Roa> roas() const noexcept { return roas_; }

    /// Every ROA whose prefix covers `p`, in sorted order.
    std::vector<Roa> covering(const IpPrefix& p) const;
    bool has_covering(const IpPrefix& p) const;

    /// Visits the index of each covering ROA; stops early when `fn` returns false.
    template <typename Fn>
    void for_each_covering(const IpPrefix& p, Fn&& fn) const
    {
        std::int32_t node = roots_[p.afi() == Afi::IPv4 ? 0 : 1];
        for (unsigned depth = 0; node >= 0; ++depth) {
            for (std::uint32_t idx : nodes_[node].roas) {
                if (!fn(idx)) return;
            }
            if (depth == p.length()) break;
            node = nodes_[node].child[p.bit(depth)];
        }
    }

private:
    struct Node {
        std::array<std::int32_t, 2> child{-1, -1};
        std::vector<std::uint32_t> roas;
    };

    void insert(std::uint32_t index);

    std::vector<Roa> roas_;
    std::vector<Node> nodes_;
    std::array<std::int32_t, 2> roots_{-1, -1};
};

enum class ValidationState : std::uint8_t { Valid, Invalid, NotFound };

std::string_view to_string(ValidationState s) noexcept;

struct OriginValidationOutcome {
    ValidationState state = ValidationState::NotFound;
    /// Covering ROAs that authorize the route (sorted).
    std::vector<Roa> matched;
    /// All ROAs covering the announced prefix (sorted).
    std::vector<Roa> covering;

    friend bool operator==(const OriginValidationOutcome&, const OriginValidationOutcome&) = default;
};

/// Cover / match / maxLength origin validation. An Indeterminate origin
/// never matches, so a covered route with an AS_SET origin is Invalid.
OriginValidationOutcome validate_origin(const RoaStore& store, const IpPrefix& prefix,
                                        const OriginResult& origin);

struct RowError {
    std::size_t line = 0;
    std::string reason;
};

struct RoaLoadResult {
    RoaStore store;
    std::vector<RowError> errors;
};

inline constexpr std::string_view kRoaCsvHeader = "ASN,IP Prefix,Max Length,Trust Anchor";

/// Parses the validated-cache CSV export. Throws Error(MissingHeader) if the
/// first line is not kRoaCsvHeader; bad data rows are collected in
/// `errors` (1-based line numbers) and loading continues.
RoaLoadResult load_roa_csv(std::string_view text);
/// Throws Error(Io) if the file cannot be read.
RoaLoadResult load_roa_file(const std::filesystem::path& path);

struct CoverageStats {
    std::size_t total = 0;
    std::size_t covered = 0;
    // Filled only when origins are supplied.
    std::size_t valid = 0;
    std::size_t invalid = 0;
    std::size_t not_found = 0;

    /// covered / total
    double fraction() const noexcept
    {
        return total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
    }
    /// Exact fraction rounded half-up to `decimals` places, computed in
    /// integer arithmetic.
    std::string fraction_text(unsigned decimals = 3) const;
};

/// Throws Error(EmptyUniverse) for an empty universe.
CoverageStats coverage_stats(const RoaStore& store, std::span<const IpPrefix> universe);
CoverageStats coverage_stats(const RoaStore& store,
                             std::span<const std::pair<IpPrefix, OriginResult>> routes);

}  // namespace bgpsecx
