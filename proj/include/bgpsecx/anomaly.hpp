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
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bgpsecx/model.hpp"
#include "bgpsecx/prefix.hpp"

namespace bgpsecx {

class RoaStore;

struct OriginRecord {
    std::int64_t first_seen = 0;
    std::int64_t last_seen = 0;
    std::set<IxpId> sources;

    friend bool operator==(const OriginRecord&, const OriginRecord&) = default;
};

struct PrefixRecord {
    std::map<Asn, OriginRecord> origins;

    friend bool operator==(const PrefixRecord&, const PrefixRecord&) = default;
};

/// Unordered AS adjacency, stored smaller ASN first.
struct AsnPair {
    Asn low;
    Asn high;

    static AsnPair of(Asn a, Asn b) noexcept { return a < b ? AsnPair{a, b} : AsnPair{b, a}; }
    std::uint64_t key() const noexcept { return (std::uint64_t{low.value} << 32) | high.value; }

    friend auto operator<=>(const AsnPair&, const AsnPair&) = default;
    friend bool operator==(const AsnPair&, const AsnPair&) = default;
};

/// Consecutive distinct ASN pairs inside SEQUENCE segments (prepending
/// repeats are not edges), canonicalized and de-duplicated in path order.
std::vector<AsnPair> path_edges(const AsPath& path);

/// Per-prefix origin memory plus the set of AS adjacencies seen in paths.
/// Single writer; readers may run concurrently between writes.
class ObservationHistory {
public:
    /// `max_prefixes` caps the prefix table with least-recently-updated
    /// eviction; unbounded when absent.
    explicit ObservationHistory(std::optional<std::size_t> max_prefixes = std::nullopt);

    /// Records an Announce (withdrawals are ignored). Returns whether the
    /// history changed; re-recording an identical observation is a no-op.
    bool record(const RouteAnnouncement& ann, const IxpId& source);

    const PrefixRecord* find(const IpPrefix& p) const;

    /// Calls fn(prefix, record) for every stored prefix covering `p`
    /// (including `p` itself), shortest first.
    template <typename Fn>
    void for_each_covering(const IpPrefix& p, Fn&& fn) const
    {
        const auto& lengths = lengths_[p.afi() == Afi::IPv4 ? 0 : 1];
        for (unsigned len = 0; len <= p.length(); ++len) {
            if (lengths[len] == 0) continue;
            const IpPrefix candidate = p.truncated(len);
            auto it = prefixes_.find(candidate);
            if (it != prefixes_.end()) fn(it->first, it->second.record);
        }
    }

    bool has_edge(AsnPair edge) const { return edges_.contains(edge.key()); }

    std::size_t prefix_count() const noexcept { return prefixes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    /// Number of record() calls that changed the history.
    std::uint64_t observations() const noexcept { return observations_; }
    /// Latest announcement timestamp recorded.
    std::int64_t clock() const noexcept { return clock_; }

    /// Sorted snapshot, for tests and diagnostics.
    std::map<IpPrefix, PrefixRecord> snapshot() const;

private:
    struct Slot {
        PrefixRecord record;
        std::uint64_t touched = 0;
    };

    void touch(const IpPrefix& p, Slot& slot);
    void evict_if_needed();

    std::unordered_map<IpPrefix, Slot> prefixes_;
    std::array<std::array<std::uint32_t, 129>, 2> lengths_{};
    std::unordered_set<std::uint64_t> edges_;
    std::optional<std::size_t> max_prefixes_;
    std::map<std::uint64_t, IpPrefix> lru_;
    std::uint64_t tick_ = 0;
    std::uint64_t observations_ = 0;
    std::int64_t clock_ = 0;
};

/// record_observation(h, ann, source): same as h.record(ann, source).
inline void record_observation(ObservationHistory& h, const RouteAnnouncement& ann, const IxpId& source)
{
    h.record(ann, source);
}

struct AnomalyParams {
    /// An origin is stable once last_seen - first_seen reaches this.
    std::int64_t stability_window = 86400;
    /// New-edge alarms are suppressed until the history has this many observations.
    std::uint64_t warmup_observations = 1000;
};

enum class AlarmKind : std::uint8_t { Moas, SubPrefix, NewEdge };
enum class Severity : std::uint8_t { Info, Warning, Critical };

std::string_view to_string(AlarmKind k) noexcept;
std::string_view to_string(Severity s) noexcept;

struct Alarm {
    AlarmKind kind = AlarmKind::Moas;
    IpPrefix prefix;
    Severity severity = Severity::Info;
    std::int64_t timestamp = 0;
    // Detail: implicated origins, covering prefixes, or unseen adjacencies.
    std::vector<Asn> asns;
    std::vector<IpPrefix> prefixes;
    std::vector<AsnPair> edges;

    friend bool operator==(const Alarm&, const Alarm&) = default;
};

/// Warning when the announced origin is new for a prefix that already has a
/// stable, different origin. Silent for never-seen prefixes.
std::optional<Alarm> detect_moas(const ObservationHistory& h, const RouteAnnouncement& ann,
                                 const AnomalyParams& params);

/// Fires when a strictly shorter stored prefix covering the announcement has
/// stable origins that do not include the announced origin. Critical if one
/// of those covering prefixes is covered by a ROA in `roa_context`, Warning
/// otherwise.
std::optional<Alarm> detect_subprefix(const ObservationHistory& h, const RouteAnnouncement& ann,
                                      const AnomalyParams& params, const RoaStore* roa_context = nullptr);

/// Info alarm listing path adjacencies absent from the history, once warmed up.
std::optional<Alarm> detect_new_edge(const ObservationHistory& h, const RouteAnnouncement& ann,
                                     const AnomalyParams& params);

/// All three detectors in a fixed order (Moas, SubPrefix, NewEdge).
std::vector<Alarm> detect_anomalies(const ObservationHistory& h, const RouteAnnouncement& ann,
                                    const AnomalyParams& params, const RoaStore* roa_context = nullptr);

}  // namespace bgpsecx
