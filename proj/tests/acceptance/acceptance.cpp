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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// FAIL. Every threshold is a named constant below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bgpsecx/bgp_update.hpp"
#include "bgpsecx/catalog.hpp"
#include "bgpsecx/crypto.hpp"
#include "bgpsecx/error.hpp"
#include "bgpsecx/federation.hpp"
#include "bgpsecx/mrt.hpp"
#include "bgpsecx/policy.hpp"
#include "bgpsecx/rpki.hpp"
#include "bgpsecx/simulator.hpp"
#include "bgpsecx/whitelist.hpp"
#include "support.hpp"

using namespace bgpsecx;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::size_t kRoaCases = 10000;
constexpr std::size_t kMaxRoasPerCase = 50;
constexpr double kRoaTimeLimitSeconds = 10.0;
constexpr int kScenarioRuns = 3;
constexpr std::size_t kFlipFrames = 32;
constexpr std::size_t kRoundTrips = 10000;
constexpr std::size_t kQuorumCases = 21;
constexpr std::size_t kFuzzInputs = 100000;
constexpr std::size_t kFuzzMaxLength = 4096;
constexpr std::size_t kUniverse = 2000;
constexpr std::size_t kCoveredCount = 100;  // 5% of kUniverse
constexpr const char* kCoverageExpected = "0.050";
constexpr std::size_t kWhitelistTriples = 1000;
constexpr double kMinAnnouncementsPerSecond = 50000.0;
constexpr std::uint64_t kThroughputAnnouncements = 500000;

struct Outcome {
    bool pass = false;
    std::string detail;
};

IpPrefix P(const char* text) { return IpPrefix::parse(text); }

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// --- 1 ---------------------------------------------------------------------

OriginValidationOutcome linear_validate(std::vector<Roa> roas, const IpPrefix& p, const OriginResult& origin)
{
    std::sort(roas.begin(), roas.end());
    roas.erase(std::unique(roas.begin(), roas.end()), roas.end());
    OriginValidationOutcome out;
    for (const auto& r : roas) {
        bool cover = r.prefix.afi() == p.afi() && r.prefix.length() <= p.length();
        for (unsigned i = 0; cover && i < r.prefix.length(); ++i) cover = r.prefix.bit(i) == p.bit(i);
        if (!cover) continue;
        out.covering.push_back(r);
        if (origin && *origin == r.origin && p.length() <= r.max_length) out.matched.push_back(r);
    }
    out.state = !out.matched.empty()    ? ValidationState::Valid
                : !out.covering.empty() ? ValidationState::Invalid
                                        : ValidationState::NotFound;
    return out;
}

Outcome roa_oracle()
{
    std::mt19937_64 rng(1);
    const auto t0 = Clock::now();
    std::size_t mismatches = 0;
    std::size_t states[3] = {};
    for (std::size_t i = 0; i < kRoaCases; ++i) {
        const Afi afi = (i % 4 == 3) ? Afi::IPv6 : Afi::IPv4;
        const IpPrefix base = afi == Afi::IPv4 ? P("10.0.0.0/8") : P("2001:db8::/32");
        std::vector<Roa> roas(rng() % (kMaxRoasPerCase + 1));
        for (auto& r : roas) {
            const unsigned len = base.length() + static_cast<unsigned>(rng() % 17);
            r.prefix = test::random_subprefix(rng, base, len);
            r.max_length = len + static_cast<unsigned>(rng() % (std::min(max_length(afi), len + 8) - len + 1));
            r.origin = Asn{65000 + static_cast<std::uint32_t>(rng() % 4)};
            r.trust_anchor = (rng() & 1) ? "ta-a" : "ta-b";
        }
        const IpPrefix route = (rng() % 10 == 0)
                                   ? test::random_prefix(rng, afi, 0, max_length(afi))
                                   : test::random_subprefix(rng, base, base.length() + static_cast<unsigned>(rng() % 25));
        const OriginResult origin =
            (rng() % 8 == 0) ? OriginResult{} : OriginResult{Asn{65000 + static_cast<std::uint32_t>(rng() % 4)}};
        const auto got = validate_origin(RoaStore(roas), route, origin);
        if (got != linear_validate(roas, route, origin)) ++mismatches;
        ++states[static_cast<int>(got.state)];
    }
    const double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu cases, %zu mismatches, valid/invalid/notfound %zu/%zu/%zu, %.2fs (limit %.0fs)",
                  kRoaCases, mismatches, states[0], states[1], states[2], secs, kRoaTimeLimitSeconds);
    return {mismatches == 0 && secs < kRoaTimeLimitSeconds, buf};
}

// --- 2 ---------------------------------------------------------------------

Outcome scenario_suite(const std::filesystem::path& data)
{
    std::string detail;
    bool pass = true;
    const auto catalog = scenario_catalog(data);
    if (catalog.size() != 4) return {false, "expected 4 scenarios, found " + std::to_string(catalog.size())};
    for (const auto& m : catalog) {
        if (!verify_digests(m, data).empty()) {
            pass = false;
            detail += m.id + " digest mismatch; ";
            continue;
        }
        const Scenario s = load_scenario_file(data / m.entry);
        const RunResult first = run(s);
        bool identical = true;
        for (int i = 1; i < kScenarioRuns; ++i) identical = identical && run(s).event_log == first.event_log;
        const AttackKind k = m.scenario->attack;
        const std::string rate = detection_rate_text(first.metrics.detected_of(k), first.metrics.injected_of(k));
        const bool ok = rate == "1.000" && first.metrics.false_positives == 0 && identical;
        pass = pass && ok;
        detail += m.id + " rate=" + rate + " fp=" + std::to_string(first.metrics.false_positives) +
                  (identical ? " logs identical" : " logs differ") + "; ";
    }
    return {pass, detail};
}

// --- 3 ---------------------------------------------------------------------

Outcome clean_replay(const std::filesystem::path& data)
{
    const auto dir = data / "traces";
    const RoaStore roas = load_roa_file(dir / "clean-roas.csv").store;
    const Whitelist wl = load_whitelist_file(dir / "clean-whitelist.json");
    ObservationHistory history;
    Engine engine(IxpId::make("ixp-clean"), &roas, &wl, history, PolicyConfig{});
    auto src = mrt::open_trace(dir / "clean.mrt");
    mrt::AnnouncementStream stream(*src);
    std::vector<RouteAnnouncement> batch;
    std::uint64_t n = 0, reject = 0, flag = 0;
    while (stream.next(batch)) {
        for (const auto& a : batch) {
            const auto r = engine.process(a);
            if (a.kind != RouteKind::Announce) continue;
            ++n;
            reject += r.verdict.action == Action::Reject;
            flag += r.verdict.action == Action::Flag;
        }
    }
    const bool pass = n > 0 && reject == 0 && flag == 0 && !stream.truncated();
    return {pass, std::to_string(n) + " announcements, reject=" + std::to_string(reject) +
                      " flag=" + std::to_string(flag)};
}

// --- 4 ---------------------------------------------------------------------

FederationMessage random_message(std::mt19937_64& rng, std::size_t max_payload)
{
    FederationMessage m;
    m.type = static_cast<MsgType>(1 + rng() % 5);
    std::string sender(1 + rng() % 32, 'x');
    for (auto& c : sender) c = static_cast<char>(0x21 + rng() % 94);
    m.sender = IxpId::make(sender);
    m.sequence = rng();
    m.payload.resize(rng() % (max_payload + 1));
    for (auto& c : m.payload) c = static_cast<char>(rng());
    return m;
}

Key random_key(std::mt19937_64& rng)
{
    Key k;
    for (auto& b : k) b = static_cast<std::uint8_t>(rng());
    return k;
}

Outcome federation_integrity()
{
    std::mt19937_64 rng(4);
    std::size_t flips = 0, flip_auth = 0;
    for (std::size_t f = 0; f < kFlipFrames; ++f) {
        const Key key = random_key(rng);
        const Bytes frame = encode_message(random_message(rng, 96), key);
        for (std::size_t pos = 0; pos < frame.size(); ++pos) {
            Bytes bad = frame;
            bad[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
            ++flips;
            try {
                decode_message(bad, key);
            } catch (const Error& e) {
                flip_auth += e.code() == Errc::AuthFailure;
            }
        }
    }

    std::size_t round_ok = 0;
    for (std::size_t i = 0; i < kRoundTrips; ++i) {
        const Key key = random_key(rng);
        const FederationMessage m = random_message(rng, 512);
        const Bytes frame = encode_message(m, key);
        round_ok += decode_message(frame, key) == m && encode_message(m, key) == frame;
    }

    bool replay_rejected = false;
    {
        const Key key = random_key(rng);
        const Bytes frame = encode_message(random_message(rng, 32), key);
        SessionState session;
        decode_message(frame, key, &session);
        try {
            decode_message(frame, key, &session);
        } catch (const Error& e) {
            replay_rejected = e.code() == Errc::ReplayDetected;
        }
    }
    const bool pass = flips > 0 && flip_auth == flips && round_ok == kRoundTrips && replay_rejected;
    return {pass, std::to_string(flip_auth) + "/" + std::to_string(flips) + " flips AuthFailure, " +
                      std::to_string(round_ok) + "/" + std::to_string(kRoundTrips) + " round-trips, replay " +
                      (replay_rejected ? "rejected" : "accepted")};
}

// --- 5 ---------------------------------------------------------------------

Outcome quorum_table()
{
    const QuorumPolicy q;  // min_responders 2, quorum 1/2
    RouteAnnouncement ann;
    ann.prefix = P("203.0.113.0/24");
    ann.as_path = AsPath::sequence({65001});
    std::size_t cases = 0, agree = 0;
    for (std::size_t r = 0; r <= 5; ++r) {
        for (std::size_t g = 0; g <= r; ++g) {
            std::vector<ObservationClaim> claims;
            for (std::size_t i = 0; i < r; ++i) {
                claims.push_back(ObservationClaim{P("203.0.113.0/24"), {Asn{i < g ? 65001u : 65002u}}, 0, 1,
                                                  IxpId::make("peer-" + std::to_string(i))});
            }
            // agreeing/responders >= 1/2, cross-multiplied
            const CrossState want = r < 2 ? CrossState::Unknown
                                    : 2 * g >= r ? CrossState::Corroborated
                                                 : CrossState::Disputed;
            ++cases;
            agree += cross_validate(ann, claims, q) == CrossValidation{want, r, g};
        }
    }
    return {cases == kQuorumCases && agree == cases,
            std::to_string(agree) + "/" + std::to_string(cases) + " cases match the threshold rule"};
}

// --- 6 ---------------------------------------------------------------------

Outcome mrt_parity(const std::filesystem::path& data)
{
    const auto dir = data / "traces";
    const auto ref = nlohmann::json::parse(read_file(dir / "reference-counts.json"));
    bool pass = ref.contains("collector-sample.mrt");
    std::string detail;
    for (const auto& [name, want] : ref.items()) {
        auto src = mrt::open_trace(dir / name);
        mrt::AnnouncementStream stream(*src);
        std::vector<RouteAnnouncement> batch;
        while (stream.next(batch)) {
        }
        const auto& c = stream.counters();
        const bool ok = c.records == want["records"].get<std::uint64_t>() &&
                        c.announcements == want["announcements"].get<std::uint64_t>() &&
                        c.withdrawals == want["withdrawals"].get<std::uint64_t>() && !stream.truncated();
        pass = pass && ok;
        detail += name + (ok ? " ok" : " MISMATCH") + " (" + std::to_string(c.records) + "/" +
                  std::to_string(c.announcements) + "); ";
    }

    std::mt19937_64 rng(6);
    const Bytes seed = from_hex(std::string(32, 'f') + "002f02000000144001010040020602010000fde9400304c000020118c63364");
    std::size_t parsed = 0, rejected = 0;
    for (std::size_t i = 0; i < kFuzzInputs; ++i) {
        Bytes msg;
        if (i % 2 == 0) {
            msg.resize(rng() % (kFuzzMaxLength + 1));
            for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
            if (msg.size() >= 19 && (rng() & 1)) {
                std::fill(msg.begin(), msg.begin() + 16, 0xFF);
                msg[16] = static_cast<std::uint8_t>(msg.size() >> 8);
                msg[17] = static_cast<std::uint8_t>(msg.size());
                msg[18] = 2;
            }
        } else {
            msg = seed;
            for (int f = 0, n = 1 + static_cast<int>(rng() % 4); f < n; ++f) {
                msg[16 + rng() % (msg.size() - 16)] = static_cast<std::uint8_t>(rng());
            }
        }
        try {
            parse_update(msg);
            ++parsed;
        } catch (const Error&) {
            ++rejected;
        }
    }
    pass = pass && parsed + rejected == kFuzzInputs;
    detail += "fuzz " + std::to_string(kFuzzInputs) + " inputs, " + std::to_string(parsed) + " parsed, " +
              std::to_string(rejected) + " declared errors, 0 crashes";
    return {pass, detail};
}

// --- 7 ---------------------------------------------------------------------

Outcome coverage()
{
    // Disjoint /24s, one per (second, third) octet pair, so no ROA covers
    // more than its own universe entry.
    std::vector<IpPrefix> universe;
    for (std::size_t i = 0; i < kUniverse; ++i) {
        const std::uint8_t addr[] = {100, static_cast<std::uint8_t>(64 + i / 256), static_cast<std::uint8_t>(i % 256), 0};
        universe.push_back(IpPrefix::canonical(Afi::IPv4, addr, 24));
    }
    std::vector<std::size_t> idx(kUniverse);
    for (std::size_t i = 0; i < kUniverse; ++i) idx[i] = i;
    std::mt19937_64 rng(7);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<Roa> roas;
    for (std::size_t i = 0; i < kCoveredCount; ++i) roas.push_back(Roa{universe[idx[i]], 24, Asn{64512}, "ta"});
    const auto stats = coverage_stats(RoaStore(roas), universe);
    const std::string text = stats.fraction_text(3);
    return {text == kCoverageExpected && stats.covered == kCoveredCount,
            std::to_string(stats.covered) + "/" + std::to_string(stats.total) + " covered, coverage " + text};
}

// --- 8 ---------------------------------------------------------------------

Whitelist random_whitelist(std::mt19937_64& rng)
{
    const IpPrefix pool = P("198.18.0.0/15");
    Whitelist wl;
    wl.source_ixp = "ixp-" + std::to_string(rng() % 5);
    wl.version = rng() % 10;
    for (int m = 0, n = static_cast<int>(rng() % 5); m < n; ++m) {
        WhitelistEntry e;
        e.member = Asn{65000 + static_cast<std::uint32_t>(rng() % 8)};
        unsigned longest = 0;
        for (int k = 0, c = static_cast<int>(rng() % 4); k < c; ++k) {
            const IpPrefix p = test::random_subprefix(rng, pool, 16 + static_cast<unsigned>(rng() % 4));
            e.allowed.insert(p);
            longest = std::max(longest, p.length());
        }
        if (rng() & 1) e.allow_more_specifics_up_to = longest + static_cast<unsigned>(rng() % 6);
        wl.entries.insert_or_assign(e.member, e);
    }
    return wl;
}

Outcome whitelist_algebra()
{
    auto merge = [](const Whitelist& a, const Whitelist& b) {
        const Whitelist in[] = {a, b};
        return merge_cluster(in).entries;
    };
    auto lift = [](std::map<Asn, WhitelistEntry> entries) {
        Whitelist w;
        w.entries = std::move(entries);
        return w;
    };
    std::mt19937_64 rng(8);
    std::size_t comm = 0, assoc = 0, idem = 0;
    for (std::size_t i = 0; i < kWhitelistTriples; ++i) {
        const Whitelist a = random_whitelist(rng), b = random_whitelist(rng), c = random_whitelist(rng);
        comm += merge(a, b) == merge(b, a);
        assoc += merge(lift(merge(a, b)), c) == merge(a, lift(merge(b, c)));
        idem += merge(a, a) == a.entries;
    }
    const std::size_t n = kWhitelistTriples;
    return {comm == n && assoc == n && idem == n,
            std::to_string(n) + " triples: commutative " + std::to_string(comm) + ", associative " +
                std::to_string(assoc) + ", idempotent " + std::to_string(idem)};
}

// --- 9 ---------------------------------------------------------------------

Outcome throughput(const std::filesystem::path& data)
{
    const auto dir = data / "traces";
    const RoaStore roas = load_roa_file(dir / "clean-roas.csv").store;
    const Whitelist wl = load_whitelist_file(dir / "clean-whitelist.json");
    const std::string raw = read_file(dir / "clean.mrt");
    const ByteView bytes(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size());

    PolicyConfig cfg;
    cfg.defenses.federation = false;
    cfg.query_federation_on = QueryTrigger::Never;

    std::uint64_t processed = 0;
    const auto t0 = Clock::now();
    while (processed < kThroughputAnnouncements) {
        ObservationHistory history;
        Engine engine(IxpId::make("ixp-bench"), &roas, &wl, history, cfg);
        mrt::MemorySource src(bytes);
        mrt::AnnouncementStream stream(src);
        std::vector<RouteAnnouncement> batch;
        while (stream.next(batch)) {
            for (const auto& a : batch) {
                engine.process(a);
                ++processed;
            }
        }
        if (stream.counters().announcements == 0) return {false, "trace yielded no announcements"};
    }
    const double secs = seconds_since(t0);
    const double rate = static_cast<double>(processed) / secs;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu announcements in %.3fs = %.0f/s (floor %.0f/s)",
                  static_cast<unsigned long long>(processed), secs, rate, kMinAnnouncementsPerSecond);
    return {rate >= kMinAnnouncementsPerSecond, buf};
}

}  // namespace

int main()
{
    const std::filesystem::path data = test::data_dir();
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"roa-oracle-equivalence", roa_oracle},
        {"scenario-suite", [&] { return scenario_suite(data); }},
        {"clean-replay", [&] { return clean_replay(data); }},
        {"federation-integrity", federation_integrity},
        {"cross-validation-quorum", quorum_table},
        {"mrt-parity-and-fuzz", [&] { return mrt_parity(data); }},
        {"coverage-statistic", coverage},
        {"whitelist-algebra", whitelist_algebra},
        {"throughput", [&] { return throughput(data); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
