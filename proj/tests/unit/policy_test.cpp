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

#include <random>
#include <string>
#include <vector>

#include "bgpsecx/error.hpp"
#include "bgpsecx/policy.hpp"
#include "support.hpp"

using namespace bgpsecx;

namespace {

IpPrefix P(const char* text) { return IpPrefix::parse(text); }
IxpId X(const char* id) { return IxpId::make(id); }

RouteAnnouncement ann(std::uint32_t member, const char* prefix, std::uint32_t origin, std::int64_t ts = 1000)
{
    RouteAnnouncement a;
    a.announcing_member = Asn{member};
    a.prefix = P(prefix);
    a.as_path = member == origin ? AsPath::sequence({member}) : AsPath::sequence({member, origin});
    a.timestamp = ts;
    return a;
}

Alarm alarm(AlarmKind k, Severity s)
{
    Alarm a;
    a.kind = k;
    a.severity = s;
    a.prefix = P("192.0.2.0/24");
    return a;
}

DefenseEvidence evidence(ValidationState roa, FilterState wl, std::optional<CrossState> fed,
                         std::vector<Severity> alarms)
{
    DefenseEvidence ev;
    ev.roa.state = roa;
    ev.whitelist.state = wl;
    if (fed) ev.federation = CrossValidation{*fed, 3, 1};
    for (auto s : alarms) ev.anomalies.push_back(alarm(s == Severity::Info ? AlarmKind::NewEdge : AlarmKind::SubPrefix, s));
    return ev;
}

// Hand restatement of the default table: (id, fires, action).
std::pair<Action, std::vector<std::string>> oracle(const DefenseEvidence& ev, Action no_policy)
{
    bool critical = false, soft = false;
    for (const auto& a : ev.anomalies) (a.severity == Severity::Critical ? critical : soft) = true;
    const bool disputed = ev.federation && ev.federation->state == CrossState::Disputed;
    const std::vector<std::tuple<std::string, bool, Action>> table = {
        {"roa-invalid", ev.roa.state == ValidationState::Invalid, Action::Reject},
        {"whitelist-violation", ev.whitelist.state == FilterState::Violation, Action::Reject},
        {"federation-disputed", disputed, Action::Flag},
        {"anomaly-critical", critical, Action::Flag},
        {"anomaly", soft, Action::Flag},
        {"whitelist-no-policy", ev.whitelist.state == FilterState::NoPolicy, no_policy},
        {"default", true, Action::Accept},
    };
    Action decided = Action::Accept;
    for (const auto& [id, fires, act] : table) {
        if (fires) {
            decided = act;
            break;
        }
    }
    std::vector<std::string> reasons;
    if (decided != Action::Accept) {
        for (const auto& [id, fires, act] : table) {
            if (fires && act == decided) reasons.push_back(id);
        }
    }
    return {decided, reasons};
}

// Scripted peers: each answers with fixed claims, or fails.
class FixedClient : public FederationClient {
public:
    std::vector<ObservationClaim> claims;
    bool down = false;
    std::uint64_t sent = 0;

    std::vector<ObservationClaim> query(const IpPrefix&) override
    {
        ++sent;
        if (down) throw Error(Errc::Transport, "down");
        return claims;
    }
    void push(const std::vector<RouteAnnouncement>&) override {}
    std::uint64_t queries_sent() const noexcept override { return sent; }
};

ObservationClaim claim(const char* who, const char* prefix, std::uint32_t origin)
{
    return ObservationClaim{P(prefix), {Asn{origin}}, 0, 10, X(who)};
}

}  // namespace

TEST(Policy, EvaluateExamples)
{
    const PolicyConfig cfg;
    const auto a = ann(65010, "192.0.2.0/24", 65010);

    Verdict v = evaluate(a, evidence(ValidationState::Valid, FilterState::Pass, std::nullopt, {}), cfg);
    EXPECT_EQ(v.action, Action::Accept);
    EXPECT_TRUE(v.reasons.empty());

    v = evaluate(a, evidence(ValidationState::Invalid, FilterState::Pass, std::nullopt, {}), cfg);
    EXPECT_EQ(v.action, Action::Reject);
    EXPECT_EQ(v.reasons, std::vector<std::string>{"roa-invalid"});

    v = evaluate(a, evidence(ValidationState::NotFound, FilterState::NoPolicy, CrossState::Disputed, {Severity::Critical}),
                 cfg);
    EXPECT_EQ(v.action, Action::Flag);
    EXPECT_EQ(v.reasons, (std::vector<std::string>{"federation-disputed", "anomaly-critical"}));
}

TEST(Policy, EvaluateMatchesRuleTableExhaustively)
{
    const ValidationState roas[] = {ValidationState::Valid, ValidationState::Invalid, ValidationState::NotFound};
    const FilterState wls[] = {FilterState::Pass, FilterState::Violation, FilterState::NoPolicy};
    const std::optional<CrossState> feds[] = {std::nullopt, CrossState::Corroborated, CrossState::Disputed,
                                              CrossState::Unknown};
    const std::vector<std::vector<Severity>> alarm_sets = {
        {}, {Severity::Info}, {Severity::Warning}, {Severity::Critical}, {Severity::Warning, Severity::Critical}};
    int n = 0;
    for (Action np : {Action::Accept, Action::Flag}) {
        PolicyConfig cfg;
        cfg.treat_no_policy_as = np;
        for (auto r : roas) {
            for (auto w : wls) {
                for (const auto& f : feds) {
                    for (const auto& al : alarm_sets) {
                        const auto ev = evidence(r, w, f, al);
                        const auto [action, reasons] = oracle(ev, np);
                        const Verdict v = evaluate(ann(1, "10.0.0.0/8", 1), ev, cfg);
                        ASSERT_EQ(v.action, action) << n;
                        ASSERT_EQ(v.reasons, reasons) << n;
                        ASSERT_EQ(v.evidence, ev);
                        const auto d = emit_directive(v, cfg);
                        EXPECT_EQ(d.has_value(), action != Action::Accept);
                        ++n;
                    }
                }
            }
        }
    }
    EXPECT_EQ(n, 360);
}

TEST(Policy, Directives)
{
    const PolicyConfig cfg;
    Verdict v;
    v.announcement = ann(65010, "198.51.100.0/24", 65010);
    v.action = Action::Reject;
    EXPECT_EQ(emit_directive(v, cfg),
              (FilterDirective{Asn{65010}, P("198.51.100.0/24"), DirectiveKind::Drop, 3600}));
    v.action = Action::Flag;
    EXPECT_EQ(emit_directive(v, cfg)->directive, DirectiveKind::Quarantine);
    EXPECT_EQ(emit_directive(v, cfg)->ttl_seconds, 3600u);
    v.action = Action::Accept;
    EXPECT_FALSE(emit_directive(v, cfg));

    PolicyConfig forever;
    forever.ttl_seconds.reset();
    v.action = Action::Flag;
    EXPECT_FALSE(emit_directive(v, forever)->ttl_seconds);
}

TEST(PolicyEngine, HijackRejectedWithoutQuery)
{
    const RoaStore roas({Roa{P("192.0.2.0/24"), 24, Asn{65010}, "ta"}});
    ObservationHistory h;
    FixedClient fed;
    Engine engine(X("ixp-a"), &roas, nullptr, h, PolicyConfig{}, &fed);
    const auto r = engine.process(ann(64999, "192.0.2.0/24", 64999));
    EXPECT_EQ(r.verdict.action, Action::Reject);
    EXPECT_EQ(r.verdict.reasons, std::vector<std::string>{"roa-invalid"});
    EXPECT_FALSE(r.queried);
    EXPECT_EQ(fed.sent, 0u);
    ASSERT_TRUE(r.directive);
    EXPECT_EQ(r.directive->directive, DirectiveKind::Drop);
}

TEST(PolicyEngine, CleanRouteGeneratesNoTraffic)
{
    const RoaStore roas({Roa{P("192.0.2.0/24"), 24, Asn{65010}, "ta"}});
    const Whitelist wl = load_whitelist(R"({"ixp":"a","version":1,"members":[{"asn":65010,"prefixes":["192.0.2.0/24"]}]})");
    ObservationHistory h;
    FixedClient fed;
    Engine engine(X("ixp-a"), &roas, &wl, h, PolicyConfig{}, &fed);
    const auto r = engine.process(ann(65010, "192.0.2.0/24", 65010));
    EXPECT_EQ(r.verdict.action, Action::Accept);
    EXPECT_FALSE(r.directive);
    EXPECT_EQ(fed.sent, 0u);
    EXPECT_NE(h.find(P("192.0.2.0/24")), nullptr);
}

TEST(PolicyEngine, DisagreeingPeersFlag)
{
    const RoaStore roas;
    const Whitelist wl = load_whitelist(R"({"ixp":"a","version":1,"members":[{"asn":64999,"prefixes":["203.0.113.0/24"]}]})");
    ObservationHistory h;
    FixedClient fed;
    fed.claims = {claim("b", "203.0.113.0/24", 65020), claim("c", "203.0.113.0/24", 65020),
                  claim("d", "203.0.113.0/24", 65020)};
    Engine engine(X("ixp-a"), &roas, &wl, h, PolicyConfig{}, &fed);
    const auto r = engine.process(ann(64999, "203.0.113.0/24", 64999));
    EXPECT_TRUE(r.queried);
    EXPECT_EQ(r.verdict.action, Action::Flag);
    EXPECT_EQ(r.verdict.reasons, std::vector<std::string>{"federation-disputed"});
    EXPECT_EQ(r.verdict.evidence->federation, (CrossValidation{CrossState::Disputed, 3, 0}));
    EXPECT_EQ(r.directive->directive, DirectiveKind::Quarantine);
}

TEST(PolicyEngine, QueryTriggers)
{
    const RoaStore roas({Roa{P("192.0.2.0/24"), 24, Asn{65010}, "ta"}});
    for (QueryTrigger t : {QueryTrigger::Never, QueryTrigger::Suspicion, QueryTrigger::Always}) {
        ObservationHistory h;
        FixedClient fed;
        PolicyConfig cfg;
        cfg.query_federation_on = t;
        Engine engine(X("ixp-a"), &roas, nullptr, h, cfg, &fed);
        engine.process(ann(65010, "192.0.2.0/24", 65010));     // Valid
        engine.process(ann(65010, "198.51.100.0/24", 65010));  // NotFound
        const std::uint64_t want = t == QueryTrigger::Never ? 0 : t == QueryTrigger::Suspicion ? 1 : 2;
        EXPECT_EQ(fed.sent, want) << to_string(t);
    }
}

TEST(PolicyEngine, WithdrawalBypassesDefenses)
{
    ObservationHistory h;
    FixedClient fed;
    Engine engine(X("ixp-a"), nullptr, nullptr, h, PolicyConfig{}, &fed);
    auto w = ann(65010, "192.0.2.0/24", 65010);
    w.kind = RouteKind::Withdraw;
    const auto r = engine.process(w);
    EXPECT_EQ(r.verdict.action, Action::Accept);
    EXPECT_FALSE(r.verdict.evidence);
    EXPECT_FALSE(r.directive);
    EXPECT_EQ(h.prefix_count(), 0u);
}

TEST(PolicyEngine, OutageKeepsHardDecisions)
{
    const RoaStore roas({Roa{P("10.0.0.0/8"), 16, Asn{65001}, "ta"}});
    const Whitelist wl = load_whitelist(R"({"ixp":"a","version":1,"members":[
        {"asn":65001,"prefixes":["10.0.0.0/8"],"allow_more_specifics_up_to":24},
        {"asn":65002,"prefixes":["172.16.0.0/12"]}]})");
    std::mt19937_64 rng(11);
    std::vector<RouteAnnouncement> anns;
    for (int i = 0; i < 2000; ++i) {
        const std::uint32_t member = 65001 + static_cast<std::uint32_t>(rng() % 3);
        const std::uint32_t origin = 65001 + static_cast<std::uint32_t>(rng() % 3);
        RouteAnnouncement a = ann(member, "10.0.0.0/8", origin, i);
        a.prefix = (rng() & 1) ? test::random_subprefix(rng, P("10.0.0.0/8"), 8 + static_cast<unsigned>(rng() % 17))
                               : test::random_prefix(rng, Afi::IPv4, 8, 24);
        anns.push_back(a);
    }
    PolicyConfig cfg;
    cfg.query_federation_on = QueryTrigger::Always;
    ObservationHistory h_up, h_down;
    FixedClient up, down;
    up.claims = {claim("b", "0.0.0.0/0", 65009), claim("c", "0.0.0.0/0", 65009)};
    down.down = true;
    Engine e_up(X("ixp-a"), &roas, &wl, h_up, cfg, &up);
    Engine e_down(X("ixp-a"), &roas, &wl, h_down, cfg, &down);
    std::size_t hard = 0;
    for (const auto& a : anns) {
        const auto r_up = e_up.process(a);
        const auto r_down = e_down.process(a);
        EXPECT_FALSE(r_down.verdict.evidence->federation);
        const auto& ev = *r_up.verdict.evidence;
        if (ev.roa.state == ValidationState::Invalid || ev.whitelist.state == FilterState::Violation) {
            EXPECT_EQ(r_up.verdict.action, Action::Reject);
            EXPECT_EQ(r_down.verdict.action, Action::Reject);
            EXPECT_EQ(r_up.verdict.reasons, r_down.verdict.reasons);
            ++hard;
        }
    }
    EXPECT_GT(hard, 500u);
    EXPECT_EQ(e_down.federation_errors(), anns.size());
}

TEST(PolicyLog, VerdictLinesReproduceDecisions)
{
    const RoaStore roas({Roa{P("10.0.0.0/8"), 16, Asn{65001}, "ta"}});
    const Whitelist wl = load_whitelist(R"({"ixp":"a","version":1,"members":[
        {"asn":65001,"prefixes":["10.0.0.0/8"],"allow_more_specifics_up_to":24}]})");
    std::mt19937_64 rng(12);
    for (Action np : {Action::Accept, Action::Flag}) {
        PolicyConfig cfg;
        cfg.treat_no_policy_as = np;
        cfg.anomaly.warmup_observations = 50;
        cfg.anomaly.stability_window = 100;
        ObservationHistory h;
        FixedClient fed;
        fed.claims = {claim("b", "10.0.0.0/8", 65001), claim("c", "10.0.0.0/8", 65002),
                      claim("d", "10.0.0.0/8", 65002)};
        Engine engine(X("ixp-a"), &roas, &wl, h, cfg, &fed);
        std::size_t flagged = 0;
        for (int i = 0; i < 1500; ++i) {
            RouteAnnouncement a = ann(65001 + static_cast<std::uint32_t>(rng() % 2), "10.0.0.0/8",
                                      65001 + static_cast<std::uint32_t>(rng() % 3), i * 10);
            a.prefix = (rng() % 3) ? test::random_subprefix(rng, P("10.0.0.0/8"), 8 + static_cast<unsigned>(rng() % 10))
                                   : test::random_prefix(rng, Afi::IPv4, 8, 24);
            const auto r = engine.process(a);
            const std::string line = format_verdict_line(r.verdict);
            const LoggedVerdict lv = parse_verdict_line(line);
            EXPECT_EQ(lv.action, r.verdict.action) << line;
            EXPECT_EQ(lv.reasons, r.verdict.reasons) << line;
            const Verdict again = evaluate(lv.announcement, lv.evidence, cfg);
            EXPECT_EQ(again.action, r.verdict.action) << line;
            EXPECT_EQ(again.reasons, r.verdict.reasons) << line;
            EXPECT_EQ(format_verdict_line(again), line);
            flagged += r.verdict.action == Action::Flag;
        }
        EXPECT_GT(flagged, 0u);
    }
    EXPECT_THROW(parse_verdict_line("ts=1 garbage"), Error);
}

TEST(PolicyLog, AlarmLine)
{
    Alarm a = alarm(AlarmKind::Moas, Severity::Warning);
    a.asns = {Asn{65001}, Asn{65002}};
    const std::string line = format_alarm_line(a);
    EXPECT_EQ(line.rfind("alarm ", 0), 0u);
    EXPECT_NE(line.find("kind=Moas"), std::string::npos);
    EXPECT_NE(line.find("severity=Warning"), std::string::npos);
}

TEST(PolicyConfigLoad, FieldsAndErrors)
{
    const PolicyConfig cfg = load_policy_config(R"({"treat_no_policy_as":"Flag","query_federation_on":"Always",
        "min_responders":3,"quorum":[2,3],"stability_window":60,"warmup_observations":5,"ttl_seconds":null,
        "defenses":{"roa":false,"anomaly":false}})");
    EXPECT_EQ(cfg.treat_no_policy_as, Action::Flag);
    EXPECT_EQ(cfg.query_federation_on, QueryTrigger::Always);
    EXPECT_EQ(cfg.quorum.min_responders, 3u);
    EXPECT_EQ(cfg.quorum.quorum_numerator, 2u);
    EXPECT_EQ(cfg.quorum.quorum_denominator, 3u);
    EXPECT_EQ(cfg.anomaly.stability_window, 60);
    EXPECT_EQ(cfg.anomaly.warmup_observations, 5u);
    EXPECT_FALSE(cfg.ttl_seconds);
    EXPECT_EQ(cfg.defenses, (DefenseSet{false, true, true, false}));

    const PolicyConfig defaults = load_policy_config("{}");
    EXPECT_EQ(defaults.rules, default_rules());
    EXPECT_EQ(defaults.ttl_seconds, 3600u);

    for (const char* bad : {R"({"treat_no_policy_as":"Reject"})", R"({"quorum":[1,0]})", R"({"quorum":[3,2]})",
                            R"({"query_federation_on":"Sometimes"})", "[]", "nope"}) {
        try {
            load_policy_config(bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::SchemaError) << bad;
        }
    }
}
