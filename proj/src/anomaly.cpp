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

#include "bgpsecx/anomaly.hpp"

#include <algorithm>

#include "bgpsecx/rpki.hpp"

namespace bgpsecx {

namespace {

bool stable(const OriginRecord& r, const AnomalyParams& params)
{
    return r.last_seen - r.first_seen >= params.stability_window;
}

}  // namespace

std::vector<AsnPair> path_edges(const AsPath& path)
{
    std::vector<AsnPair> edges;
    for (const auto& seg : path.segments) {
        if (seg.type != SegmentType::Sequence) continue;
        for (std::size_t i = 1; i < seg.asns.size(); ++i) {
            if (seg.asns[i - 1] == seg.asns[i]) continue;
            const AsnPair e = AsnPair::of(seg.asns[i - 1], seg.asns[i]);
            if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
        }
    }
    return edges;
}

ObservationHistory::ObservationHistory(std::optional<std::size_t> max_prefixes)
    : max_prefixes_(max_prefixes)
{
}

void ObservationHistory::touch(const IpPrefix& p, Slot& slot)
{
    if (!max_prefixes_) return;
    if (slot.touched != 0) lru_.erase(slot.touched);
    slot.touched = ++tick_;
    lru_.emplace(slot.touched, p);
}

void ObservationHistory::evict_if_needed()
{
    if (!max_prefixes_) return;
    while (prefixes_.size() > *max_prefixes_ && !lru_.empty()) {
        const IpPrefix victim = lru_.begin()->second;
        lru_.erase(lru_.begin());
        prefixes_.erase(victim);
        --lengths_[victim.afi() == Afi::IPv4 ? 0 : 1][victim.length()];
    }
}

bool ObservationHistory::record(const RouteAnnouncement& ann, const IxpId& source)
{
    if (ann.kind != RouteKind::Announce) return false;
    bool changed = false;

    if (const OriginResult origin = ann.origin()) {
        auto [it, inserted] = prefixes_.try_emplace(ann.prefix);
        if (inserted) {
            ++lengths_[ann.prefix.afi() == Afi::IPv4 ? 0 : 1][ann.prefix.length()];
            changed = true;
        }
        auto [oit, fresh] = it->second.record.origins.try_emplace(*origin);
        OriginRecord& rec = oit->second;
        if (fresh) {
            rec.first_seen = rec.last_seen = ann.timestamp;
            changed = true;
        } else {
            if (ann.timestamp < rec.first_seen) {
                rec.first_seen = ann.timestamp;
                changed = true;
            }
            if (ann.timestamp > rec.last_seen) {
                rec.last_seen = ann.timestamp;
                changed = true;
            }
        }
        if (rec.sources.insert(source).second) changed = true;
        if (changed) touch(ann.prefix, it->second);
    }

    for (const auto& e : path_edges(ann.as_path)) {
        if (edges_.insert(e.key()).second) changed = true;
    }
    if (changed) {
        ++observations_;
        clock_ = std::max(clock_, ann.timestamp);
        evict_if_needed();
    }
    return changed;
}

const PrefixRecord* ObservationHistory::find(const IpPrefix& p) const
{
    auto it = prefixes_.find(p);
    return it == prefixes_.end() ? nullptr : &it->second.record;
}

std::map<IpPrefix, PrefixRecord> ObservationHistory::snapshot() const
{
    std::map<IpPrefix, PrefixRecord> out;
    for (const auto& [p, slot] : prefixes_) out.emplace(p, slot.record);
    return out;
}

std::string_view to_string(AlarmKind k) noexcept
{
    switch (k) {
    case AlarmKind::Moas: return "Moas";
    case AlarmKind::SubPrefix: return "SubPrefix";
    case AlarmKind::NewEdge: return "NewEdge";
    }
    return "Moas";
}

std::string_view to_string(Severity s) noexcept
{
    switch (s) {
    case Severity::Info: return "Info";
    case Severity::Warning: return "Warning";
    case Severity::Critical: return "Critical";
    }
    return "Info";
}

std::optional<Alarm> detect_moas(const ObservationHistory& h, const RouteAnnouncement& ann,
                                 const AnomalyParams& params)
{
    const OriginResult origin = ann.origin();
    if (!origin) return std::nullopt;
    const PrefixRecord* rec = h.find(ann.prefix);
    if (rec == nullptr || rec->origins.contains(*origin)) return std::nullopt;

    Alarm alarm;
    for (const auto& [asn, o] : rec->origins) {
        if (stable(o, params)) alarm.asns.push_back(asn);
    }
    if (alarm.asns.empty()) return std::nullopt;
    alarm.asns.push_back(*origin);
    std::sort(alarm.asns.begin(), alarm.asns.end());
    alarm.kind = AlarmKind::Moas;
    alarm.prefix = ann.prefix;
    alarm.severity = Severity::Warning;
    alarm.timestamp = ann.timestamp;
    return alarm;
}

std::optional<Alarm> detect_subprefix(const ObservationHistory& h, const RouteAnnouncement& ann,
                                      const AnomalyParams& params, const RoaStore* roa_context)
{
    const OriginResult origin = ann.origin();
    Alarm alarm;
    bool critical = false;
    h.for_each_covering(ann.prefix, [&](const IpPrefix& covering, const PrefixRecord& rec) {
        if (covering.length() >= ann.prefix.length()) return;
        std::vector<Asn> stable_origins;
        for (const auto& [asn, o] : rec.origins) {
            if (stable(o, params)) stable_origins.push_back(asn);
        }
        if (stable_origins.empty()) return;
        if (origin && std::find(stable_origins.begin(), stable_origins.end(), *origin) != stable_origins.end()) {
            return;
        }
        alarm.prefixes.push_back(covering);
        alarm.asns.insert(alarm.asns.end(), stable_origins.begin(), stable_origins.end());
        if (roa_context != nullptr && roa_context->has_covering(covering)) critical = true;
    });
    if (alarm.prefixes.empty()) return std::nullopt;
    if (origin) alarm.asns.push_back(*origin);
    std::sort(alarm.asns.begin(), alarm.asns.end());
    alarm.asns.erase(std::unique(alarm.asns.begin(), alarm.asns.end()), alarm.asns.end());
    alarm.kind = AlarmKind::SubPrefix;
    alarm.prefix = ann.prefix;
    alarm.severity = critical ? Severity::Critical : Severity::Warning;
    alarm.timestamp = ann.timestamp;
    return alarm;
}

std::optional<Alarm> detect_new_edge(const ObservationHistory& h, const RouteAnnouncement& ann,
                                     const AnomalyParams& params)
{
    if (h.observations() < params.warmup_observations) return std::nullopt;
    Alarm alarm;
    for (const auto& e : path_edges(ann.as_path)) {
        if (!h.has_edge(e)) alarm.edges.push_back(e);
    }
    if (alarm.edges.empty()) return std::nullopt;
    alarm.kind = AlarmKind::NewEdge;
    alarm.prefix = ann.prefix;
    alarm.severity = Severity::Info;
    alarm.timestamp = ann.timestamp;
    return alarm;
}

std::vector<Alarm> detect_anomalies(const ObservationHistory& h, const RouteAnnouncement& ann,
                                    const AnomalyParams& params, const RoaStore* roa_context)
{
    std::vector<Alarm> out;
    if (auto a = detect_moas(h, ann, params)) out.push_back(std::move(*a));
    if (auto a = detect_subprefix(h, ann, params, roa_context)) out.push_back(std::move(*a));
    if (auto a = detect_new_edge(h, ann, params)) out.push_back(std::move(*a));
    return out;
}

}  // namespace bgpsecx
