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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "bgpsecx/anomaly.hpp"
#include "bgpsecx/rpki.hpp"
#include "support.hpp"

using namespace bgpsecx;

namespace {

constexpr std::int64_t kDay = 86400;

IpPrefix P(const char* text) { return IpPrefix::parse(text); }

RouteAnnouncement ann(const char* prefix, AsPath path, std::int64_t ts)
{
    RouteAnnouncement a;
    a.prefix = P(prefix);
    a.as_path = std::move(path);
    a.announcing_member = a.as_path.empty() || a.as_path.segments[0].asns.empty() ? Asn{1} : a.as_path.segments[0].asns[0];
    a.timestamp = ts;
    return a;
}

const IxpId kA = IxpId::make("ixp-a");
const IxpId kB = IxpId::make("ixp-b");

// Brute-force model: keep the raw log and re-derive everything from it.
struct Derived {
    std::map<IpPrefix, std::map<Asn, OriginRecord>> prefixes;
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    bool operator==(const Derived&) const = default;
};

std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_of(const AsPath& path)
{
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (const auto& seg : path.segments) {
        if (seg.type != SegmentType::Sequence) continue;
        for (std::size_t i = 0; i + 1 < seg.asns.size(); ++i) {
            std::uint32_t a = seg.asns[i].value, b = seg.asns[i + 1].value;
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            if (std::find(out.begin(), out.end(), std::pair{a, b}) == out.end()) out.emplace_back(a, b);
        }
    }
    return out;
}

struct Oracle {
    std::vector<std::pair<RouteAnnouncement, IxpId>> log;
    std::uint64_t changes = 0;

    Derived derive() const
    {
        Derived d;
        for (const auto& [a, src] : log) {
            for (auto e : edges_of(a.as_path)) d.edges.insert(e);
            if (a.kind != RouteKind::Announce) continue;
            const auto o = a.origin();
            if (!o) continue;
            auto& origins = d.prefixes[a.prefix];
            auto it = origins.find(*o);
            if (it == origins.end()) {
                origins[*o] = OriginRecord{a.timestamp, a.timestamp, {src}};
            } else {
                it->second.first_seen = std::min(it->second.first_seen, a.timestamp);
                it->second.last_seen = std::max(it->second.last_seen, a.timestamp);
                it->second.sources.insert(src);
            }
        }
        return d;
    }

    void record(const RouteAnnouncement& a, const IxpId& src)
    {
        if (a.kind != RouteKind::Announce) return;
        const Derived before = derive();
        log.emplace_back(a, src);
        if (!(derive() == before)) ++changes;
    }

    std::vector<Alarm> detect(const RouteAnnouncement& a, const AnomalyParams& params, const RoaStore* roas) const
    {
        const Derived d = derive();
        auto stable = [&](const std::map<Asn, OriginRecord>& origins) {
            std::vector<Asn> out;
            for (const auto& [asn, r] : origins) {
                if (r.last_seen - r.first_seen >= params.stability_window) out.push_back(asn);
            }
            return out;
        };
        const auto o = a.origin();
        std::vector<Alarm> alarms;

        if (auto it = d.prefixes.find(a.prefix); o && it != d.prefixes.end() && !it->second.contains(*o)) {
            auto s = stable(it->second);
            if (!s.empty()) {
                s.push_back(*o);
                std::sort(s.begin(), s.end());
                alarms.push_back(Alarm{AlarmKind::Moas, a.prefix, Severity::Warning, a.timestamp, s, {}, {}});
            }
        }

        std::vector<IpPrefix> covering;
        for (const auto& [q, origins] : d.prefixes) {
            if (q.length() < a.prefix.length() && covers(q, a.prefix)) covering.push_back(q);
        }
        std::sort(covering.begin(), covering.end(),
                  [](const IpPrefix& x, const IpPrefix& y) { return x.length() < y.length(); });
        Alarm sub{AlarmKind::SubPrefix, a.prefix, Severity::Warning, a.timestamp, {}, {}, {}};
        for (const auto& q : covering) {
            const auto s = stable(d.prefixes.at(q));
            if (s.empty() || (o && std::find(s.begin(), s.end(), *o) != s.end())) continue;
            sub.prefixes.push_back(q);
            sub.asns.insert(sub.asns.end(), s.begin(), s.end());
            if (roas && !roas->covering(q).empty()) sub.severity = Severity::Critical;
        }
        if (!sub.prefixes.empty()) {
            if (o) sub.asns.push_back(*o);
            std::sort(sub.asns.begin(), sub.asns.end());
            sub.asns.erase(std::unique(sub.asns.begin(), sub.asns.end()), sub.asns.end());
            alarms.push_back(sub);
        }

        if (changes >= params.warmup_observations) {
            Alarm edge{AlarmKind::NewEdge, a.prefix, Severity::Info, a.timestamp, {}, {}, {}};
            for (auto [x, y] : edges_of(a.as_path)) {
                if (!d.edges.contains({x, y})) edge.edges.push_back(AsnPair{Asn{x}, Asn{y}});
            }
            if (!edge.edges.empty()) alarms.push_back(edge);
        }
        return alarms;
    }
};

RouteAnnouncement random_event(std::mt19937_64& rng)
{
    static const char* pool[] = {"10.0.0.0/8",  "10.0.0.0/16", "10.0.0.0/24", "10.0.1.0/24",
                                 "10.1.0.0/16", "10.1.2.0/24", "10.0.0.0/25", "11.0.0.0/8"};
    RouteAnnouncement a;
    a.prefix = P(pool[rng() % std::size(pool)]);
    PathSegment seq;
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
        const Asn asn{65000 + static_cast<std::uint32_t>(rng() % 6)};
        seq.asns.push_back(asn);
        if (rng() % 5 == 0) seq.asns.push_back(asn);
    }
    a.as_path.segments.push_back(seq);
    if (rng() % 10 == 0) a.as_path.segments.push_back(PathSegment{SegmentType::Set, {Asn{64500}, Asn{64501}}});
    a.announcing_member = seq.asns[0];
    a.timestamp = static_cast<std::int64_t>(rng() % (5 * kDay));
    if (rng() % 20 == 0) a.kind = RouteKind::Withdraw;
    return a;
}

}  // namespace

TEST(Anomaly, RecordExamples)
{
    ObservationHistory h;
    EXPECT_TRUE(h.record(ann("192.0.2.0/24", AsPath::sequence({65001}), 100), kA));
    const auto* r = h.find(P("192.0.2.0/24"));
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(r->origins.at(Asn{65001}).first_seen, 100);
    EXPECT_EQ(r->origins.at(Asn{65001}).last_seen, 100);

    h.record(ann("192.0.2.0/24", AsPath::sequence({65001}), 500), kB);
    r = h.find(P("192.0.2.0/24"));
    EXPECT_EQ(r->origins.at(Asn{65001}).first_seen, 100);
    EXPECT_EQ(r->origins.at(Asn{65001}).last_seen, 500);
    EXPECT_EQ(r->origins.at(Asn{65001}).sources, (std::set<IxpId>{kA, kB}));
    EXPECT_EQ(h.clock(), 500);
}

TEST(Anomaly, PathEdges)
{
    EXPECT_EQ(path_edges(AsPath::sequence({65001, 65002, 65003})),
              (std::vector<AsnPair>{AsnPair::of(Asn{65001}, Asn{65002}), AsnPair::of(Asn{65002}, Asn{65003})}));
    EXPECT_EQ(path_edges(AsPath::sequence({65003, 65002, 65002, 65003})),
              (std::vector<AsnPair>{AsnPair{Asn{65002}, Asn{65003}}}));
    const AsnPair e = AsnPair::of(Asn{9}, Asn{3});
    EXPECT_EQ(e.low, Asn{3});
}

TEST(Anomaly, RecordIsIdempotent)
{
    ObservationHistory h;
    const auto a = ann("192.0.2.0/24", AsPath::sequence({65001, 65002}), 100);
    EXPECT_TRUE(h.record(a, kA));
    const auto snap = h.snapshot();
    EXPECT_FALSE(h.record(a, kA));
    EXPECT_EQ(h.snapshot(), snap);
    EXPECT_EQ(h.observations(), 1u);
}

TEST(Anomaly, WithdrawalsIgnored)
{
    ObservationHistory h;
    auto w = ann("192.0.2.0/24", AsPath::sequence({65001}), 100);
    w.kind = RouteKind::Withdraw;
    EXPECT_FALSE(h.record(w, kA));
    EXPECT_EQ(h.prefix_count(), 0u);
}

TEST(Anomaly, MoasExamples)
{
    AnomalyParams params;
    ObservationHistory h;
    h.record(ann("192.0.2.0/24", AsPath::sequence({65001}), 0), kA);
    h.record(ann("192.0.2.0/24", AsPath::sequence({65001}), 10 * kDay), kA);

    const auto alarm = detect_moas(h, ann("192.0.2.0/24", AsPath::sequence({65002}), 10 * kDay + 1), params);
    ASSERT_TRUE(alarm);
    EXPECT_EQ(alarm->asns, (std::vector<Asn>{Asn{65001}, Asn{65002}}));
    EXPECT_EQ(alarm->severity, Severity::Warning);

    EXPECT_FALSE(detect_moas(h, ann("192.0.2.0/24", AsPath::sequence({65001}), 11 * kDay), params));
    EXPECT_FALSE(detect_moas(h, ann("198.51.100.0/24", AsPath::sequence({65002}), 11 * kDay), params));
}

TEST(Anomaly, MoasNeedsStableOrigin)
{
    ObservationHistory h;
    h.record(ann("192.0.2.0/24", AsPath::sequence({65001}), 0), kA);
    h.record(ann("192.0.2.0/24", AsPath::sequence({65001}), kDay - 1), kA);
    EXPECT_FALSE(detect_moas(h, ann("192.0.2.0/24", AsPath::sequence({65002}), kDay), AnomalyParams{}));
}

TEST(Anomaly, SubPrefixExamples)
{
    AnomalyParams params;
    ObservationHistory h;
    h.record(ann("203.0.112.0/22", AsPath::sequence({65001}), 0), kA);
    h.record(ann("203.0.112.0/22", AsPath::sequence({65001}), 2 * kDay), kA);

    const auto alarm = detect_subprefix(h, ann("203.0.113.0/24", AsPath::sequence({64999}), 2 * kDay), params);
    ASSERT_TRUE(alarm);
    EXPECT_EQ(alarm->prefixes, (std::vector<IpPrefix>{P("203.0.112.0/22")}));
    EXPECT_EQ(alarm->asns, (std::vector<Asn>{Asn{64999}, Asn{65001}}));
    EXPECT_EQ(alarm->severity, Severity::Warning);

    EXPECT_FALSE(detect_subprefix(h, ann("203.0.113.0/24", AsPath::sequence({65001}), 2 * kDay), params));
    EXPECT_FALSE(detect_subprefix(h, ann("198.51.100.0/24", AsPath::sequence({64999}), 2 * kDay), params));

    const RoaStore roas({Roa{P("203.0.112.0/22"), 22, Asn{65001}, "ta"}});
    const auto critical = detect_subprefix(h, ann("203.0.113.0/24", AsPath::sequence({64999}), 2 * kDay), params, &roas);
    ASSERT_TRUE(critical);
    EXPECT_EQ(critical->severity, Severity::Critical);
}

TEST(Anomaly, NewEdgeExamples)
{
    AnomalyParams params;
    params.warmup_observations = 3;
    ObservationHistory h;
    h.record(ann("10.0.0.0/8", AsPath::sequence({65001, 65002}), 1), kA);
    h.record(ann("11.0.0.0/8", AsPath::sequence({65004}), 2), kA);
    const auto path = AsPath::sequence({65001, 65002, 65003});
    EXPECT_FALSE(detect_new_edge(h, ann("12.0.0.0/8", path, 3), params));

    h.record(ann("13.0.0.0/8", AsPath::sequence({65005}), 3), kA);
    const auto alarm = detect_new_edge(h, ann("12.0.0.0/8", path, 4), params);
    ASSERT_TRUE(alarm);
    EXPECT_EQ(alarm->edges, (std::vector<AsnPair>{AsnPair{Asn{65002}, Asn{65003}}}));
    EXPECT_EQ(alarm->severity, Severity::Info);
    EXPECT_FALSE(detect_new_edge(h, ann("12.0.0.0/8", AsPath::sequence({65002, 65001}), 4), params));

    ObservationHistory cold;
    for (int i = 0; i < 10; ++i) cold.record(ann("10.0.0.0/8", AsPath::sequence({65001}), i), kA);
    EXPECT_FALSE(detect_new_edge(cold, ann("12.0.0.0/8", path, 20), AnomalyParams{}));
}

TEST(Anomaly, SelfConsistentAfterRecording)
{
    std::mt19937_64 rng(3);
    AnomalyParams params;
    params.warmup_observations = 5;
    ObservationHistory h;
    for (int i = 0; i < 500; ++i) {
        const auto a = random_event(rng);
        h.record(a, kA);
        if (a.kind != RouteKind::Announce) continue;
        for (const auto& alarm : detect_anomalies(h, a, params)) {
            EXPECT_NE(alarm.kind, AlarmKind::Moas);
            EXPECT_NE(alarm.kind, AlarmKind::NewEdge);
        }
    }
}

TEST(Anomaly, EvictsLeastRecentlyUpdated)
{
    ObservationHistory h(2);
    h.record(ann("10.0.0.0/8", AsPath::sequence({1}), 1), kA);
    h.record(ann("11.0.0.0/8", AsPath::sequence({1}), 2), kA);
    h.record(ann("10.0.0.0/8", AsPath::sequence({1}), 3), kA);
    h.record(ann("12.0.0.0/8", AsPath::sequence({1}), 4), kA);
    EXPECT_EQ(h.prefix_count(), 2u);
    EXPECT_NE(h.find(P("10.0.0.0/8")), nullptr);
    EXPECT_EQ(h.find(P("11.0.0.0/8")), nullptr);
    EXPECT_NE(h.find(P("12.0.0.0/8")), nullptr);
    int seen = 0;
    h.for_each_covering(P("11.0.0.0/16"), [&](const IpPrefix&, const PrefixRecord&) { ++seen; });
    EXPECT_EQ(seen, 0);
}

TEST(AnomalyProperty, DetectorsMatchBruteForce)
{
    const RoaStore roas({Roa{P("10.0.0.0/16"), 24, Asn{65000}, "ta"}});
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        std::mt19937_64 rng(seed);
        AnomalyParams params;
        params.warmup_observations = 40;
        ObservationHistory h;
        Oracle oracle;
        for (int i = 0; i < 1000; ++i) {
            const auto a = random_event(rng);
            const IxpId& src = (rng() & 1) ? kA : kB;
            if (a.kind == RouteKind::Announce) {
                const RoaStore* ctx = (i % 2) ? &roas : nullptr;
                ASSERT_EQ(detect_anomalies(h, a, params, ctx), oracle.detect(a, params, ctx))
                    << "seed " << seed << " event " << i;
                EXPECT_EQ(detect_anomalies(h, a, params, ctx), detect_anomalies(h, a, params, ctx));
            }
            EXPECT_EQ(h.record(a, src), [&] {
                const auto before = oracle.changes;
                oracle.record(a, src);
                return oracle.changes != before;
            }());
            ASSERT_EQ(h.observations(), oracle.changes);
        }
        const Derived d = oracle.derive();
        const auto snap = h.snapshot();
        ASSERT_EQ(snap.size(), d.prefixes.size());
        for (const auto& [p, rec] : snap) EXPECT_EQ(rec.origins, d.prefixes.at(p));
        EXPECT_EQ(h.edge_count(), d.edges.size());
    }
}
