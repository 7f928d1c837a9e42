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

#include "bgpsecx/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "bgpsecx/error.hpp"

namespace bgpsecx {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& why)
{
    throw Error(Errc::SchemaError, path + ": " + why);
}

std::filesystem::path resolve_file(const std::filesystem::path& base, const json& v, const std::string& path)
{
    if (!v.is_string()) schema(path, "file name required");
    std::filesystem::path p = v.get<std::string>();
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::is_regular_file(p)) throw Error(Errc::MissingFile, p.string() + " (" + path + ")");
    return p;
}

IpPrefix prefix_value(const json& v, const std::string& path)
{
    if (!v.is_string()) schema(path, "prefix string required");
    auto p = IpPrefix::try_parse(v.get<std::string>());
    if (!p) schema(path, "invalid prefix '" + v.get<std::string>() + "'");
    return *p;
}

Asn asn_value(const json& v, const std::string& path)
{
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 0xFFFFFFFFull) schema(path, "ASN required");
    return Asn{v.get<std::uint32_t>()};
}

IxpId ixp_ref(const json& v, const std::set<IxpId>& declared, const std::string& path)
{
    if (!v.is_string()) schema(path, "IXP id required");
    const std::string text = v.get<std::string>();
    if (!IxpId::is_valid(text)) throw Error(Errc::InvalidIxpId, text + " (" + path + ")");
    IxpId id = IxpId::make(text);
    if (!declared.contains(id)) throw Error(Errc::UnknownIxp, text + " (" + path + ")");
    return id;
}

Key derived_link_key(const IxpId& a, const IxpId& b)
{
    const std::string seed = "bgpsecx-sim-link|" + a.str() + "|" + b.str();
    return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(seed.data()), seed.size()));
}

/// Fisher-Yates with rejection sampling on raw mt19937_64 output, so the
/// permutation is the same on every standard library.
void seeded_shuffle(std::vector<std::size_t>& v, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x = rng();
        while (x >= limit) x = rng();
        std::swap(v[i - 1], v[static_cast<std::size_t>(x % bound)]);
    }
}

struct Endpoint {
    std::unique_ptr<ObservationHistory> history;
    std::unique_ptr<FederationNode> node;
    std::unique_ptr<LoopbackFederationClient> client;
    std::unique_ptr<Engine> engine;
    bool linked = false;
};

RouteAnnouncement make_attack(const Scenario& s, const AttackSpec& a)
{
    const ScenarioRoute* legit = nullptr;
    std::int64_t latest = 0;
    for (const auto& r : s.routes) {
        latest = std::max(latest, r.announcement.timestamp);
        if (legit == nullptr && r.announcement.prefix == a.victim) legit = &r;
    }
    RouteAnnouncement ann;
    ann.announcing_member = a.attacker;
    ann.timestamp = a.time.value_or(latest);
    switch (a.kind) {
    case AttackKind::ExactPrefixHijack:
        ann.prefix = a.victim;
        ann.as_path = AsPath::sequence(std::vector<Asn>{a.attacker});
        break;
    case AttackKind::SubPrefixHijack:
        ann.prefix = IpPrefix::canonical(a.victim.afi(), a.victim.address(), a.victim.length() + 1);
        ann.as_path = AsPath::sequence(std::vector<Asn>{a.attacker});
        break;
    case AttackKind::RouteLeak: {
        ann.prefix = a.victim;
        std::vector<Asn> path{a.attacker};
        for (const auto& seg : legit->announcement.as_path.segments) {
            if (seg.type == SegmentType::Sequence) path.insert(path.end(), seg.asns.begin(), seg.asns.end());
        }
        ann.as_path = AsPath::sequence(path);
        ann.next_hop = legit->announcement.next_hop;
        break;
    }
    }
    return ann;
}

}  // namespace

std::string_view to_string(AttackKind k) noexcept
{
    switch (k) {
    case AttackKind::ExactPrefixHijack: return "ExactPrefixHijack";
    case AttackKind::SubPrefixHijack: return "SubPrefixHijack";
    case AttackKind::RouteLeak: return "RouteLeak";
    }
    return "ExactPrefixHijack";
}

std::optional<AttackKind> parse_attack_kind(std::string_view text) noexcept
{
    for (AttackKind k : kAttackKinds) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

Scenario build_scenario(std::string_view document, const std::filesystem::path& base_dir)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::exception& e) {
        schema("/", e.what());
    }
    if (!doc.is_object()) schema("/", "scenario must be an object");

    Scenario s;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) schema("/seed", "unsigned integer required");
        s.seed = doc["seed"].get<std::uint64_t>();
    }

    if (!doc.contains("ixps") || !doc["ixps"].is_array() || doc["ixps"].empty()) {
        schema("/ixps", "non-empty array required");
    }
    std::set<IxpId> declared;
    for (std::size_t i = 0; i < doc["ixps"].size(); ++i) {
        const std::string base = "/ixps/" + std::to_string(i);
        const json& x = doc["ixps"][i];
        if (!x.is_object() || !x.contains("id") || !x["id"].is_string()) schema(base + "/id", "required string");
        ScenarioIxp ixp;
        ixp.id = IxpId::make(x["id"].get<std::string>());
        if (!declared.insert(ixp.id).second) schema(base + "/id", "duplicate IXP " + ixp.id.str());

        if (x.contains("roas")) {
            RoaLoadResult loaded = load_roa_file(resolve_file(base_dir, x["roas"], base + "/roas"));
            if (!loaded.errors.empty()) {
                schema(base + "/roas", "line " + std::to_string(loaded.errors.front().line) + ": " +
                                           loaded.errors.front().reason);
            }
            ixp.roas = std::make_shared<const RoaStore>(std::move(loaded.store));
        } else {
            ixp.roas = std::make_shared<const RoaStore>();
        }

        std::vector<Whitelist> lists;
        if (x.contains("whitelists")) {
            if (!x["whitelists"].is_array()) schema(base + "/whitelists", "array required");
            for (std::size_t k = 0; k < x["whitelists"].size(); ++k) {
                const std::string wpath = base + "/whitelists/" + std::to_string(k);
                lists.push_back(load_whitelist_file(resolve_file(base_dir, x["whitelists"][k], wpath)));
            }
        }
        if (lists.size() == 1) {
            ixp.whitelist = std::make_shared<const Whitelist>(std::move(lists.front()));
        } else if (lists.empty()) {
            ixp.whitelist = std::make_shared<const Whitelist>(Whitelist{ixp.id.str(), 0, {}});
        } else {
            ixp.whitelist = std::make_shared<const Whitelist>(merge_cluster(lists));
        }

        if (x.contains("policy")) {
            const json& p = x["policy"];
            try {
                if (p.is_string()) {
                    ixp.policy = load_policy_config_file(resolve_file(base_dir, p, base + "/policy"));
                } else {
                    ixp.policy = load_policy_config(p.dump());
                }
            } catch (const Error& e) {
                if (e.code() != Errc::SchemaError) throw;
                schema(base + "/policy", e.what());
            }
        }
        s.ixps.push_back(std::move(ixp));
    }

    std::map<std::pair<IxpId, IxpId>, Key> links;
    if (doc.contains("links")) {
        if (!doc["links"].is_array()) schema("/links", "array required");
        for (std::size_t i = 0; i < doc["links"].size(); ++i) {
            const std::string base = "/links/" + std::to_string(i);
            const json& l = doc["links"][i];
            IxpId a;
            IxpId b;
            std::optional<Key> key;
            if (l.is_array() && l.size() == 2) {
                a = ixp_ref(l[0], declared, base + "/0");
                b = ixp_ref(l[1], declared, base + "/1");
            } else if (l.is_object() && l.contains("a") && l.contains("b")) {
                a = ixp_ref(l["a"], declared, base + "/a");
                b = ixp_ref(l["b"], declared, base + "/b");
                if (l.contains("key")) {
                    if (!l["key"].is_string()) schema(base + "/key", "hex string required");
                    key = parse_key(l["key"].get<std::string>());
                }
            } else {
                schema(base, "[a, b] or {\"a\", \"b\", \"key\"} required");
            }
            if (a == b) schema(base, "link from " + a.str() + " to itself");
            if (b < a) std::swap(a, b);
            const Key k = key.value_or(derived_link_key(a, b));
            auto [it, inserted] = links.try_emplace({a, b}, k);
            if (!inserted && it->second != k) {
                throw Error(Errc::AsymmetricLink, a.str() + " <-> " + b.str() + " declared with different keys");
            }
        }
    }
    for (const auto& [pair, key] : links) s.links.push_back(ScenarioLink{pair.first, pair.second, key});

    if (doc.contains("routes")) {
        if (!doc["routes"].is_array()) schema("/routes", "array required");
        for (std::size_t i = 0; i < doc["routes"].size(); ++i) {
            const std::string base = "/routes/" + std::to_string(i);
            const json& r = doc["routes"][i];
            if (!r.is_object()) schema(base, "object required");
            ScenarioRoute route;
            route.home = ixp_ref(r.value("ixp", json()), declared, base + "/ixp");
            RouteAnnouncement& ann = route.announcement;
            ann.prefix = prefix_value(r.value("prefix", json()), base + "/prefix");
            if (!r.contains("path") || !r["path"].is_array() || r["path"].empty()) {
                schema(base + "/path", "non-empty ASN array required");
            }
            std::vector<Asn> path;
            for (std::size_t k = 0; k < r["path"].size(); ++k) {
                path.push_back(asn_value(r["path"][k], base + "/path/" + std::to_string(k)));
            }
            ann.as_path = AsPath::sequence(path);
            ann.announcing_member = r.contains("member") ? asn_value(r["member"], base + "/member") : path.front();
            if (r.contains("time")) {
                if (!r["time"].is_number_integer()) schema(base + "/time", "integer required");
                ann.timestamp = r["time"].get<std::int64_t>();
            }
            if (r.contains("next_hop")) {
                const std::string text = r["next_hop"].is_string() ? r["next_hop"].get<std::string>() : "";
                auto host = IpPrefix::try_parse(text + (text.find(':') == std::string::npos ? "/32" : "/128"));
                if (!host) schema(base + "/next_hop", "address required");
                ann.next_hop.assign(host->address().begin(), host->address().end());
            }
            s.routes.push_back(std::move(route));
        }
    }

    if (doc.contains("attacks")) {
        if (!doc["attacks"].is_array()) schema("/attacks", "array required");
        for (std::size_t i = 0; i < doc["attacks"].size(); ++i) {
            const std::string base = "/attacks/" + std::to_string(i);
            const json& a = doc["attacks"][i];
            if (!a.is_object()) schema(base, "object required");
            AttackSpec spec;
            if (!a.contains("kind") || !a["kind"].is_string()) schema(base + "/kind", "required string");
            auto kind = parse_attack_kind(a["kind"].get<std::string>());
            if (!kind) schema(base + "/kind", "unknown attack kind " + a["kind"].dump());
            spec.kind = *kind;
            spec.victim = prefix_value(a.value("victim", json()), base + "/victim");
            spec.attacker = asn_value(a.value("attacker", json()), base + "/attacker");
            spec.entry = ixp_ref(a.value("ixp", json()), declared, base + "/ixp");
            if (!a.contains("at") || !a["at"].is_number_unsigned()) schema(base + "/at", "event index required");
            spec.inject_at = a["at"].get<std::size_t>();
            if (a.contains("time")) {
                if (!a["time"].is_number_integer()) schema(base + "/time", "integer required");
                spec.time = a["time"].get<std::int64_t>();
            }
            if (spec.kind == AttackKind::SubPrefixHijack && spec.victim.length() >= max_length(spec.victim.afi())) {
                schema(base + "/victim", "no more-specific prefix exists");
            }
            if (spec.kind == AttackKind::RouteLeak &&
                std::none_of(s.routes.begin(), s.routes.end(),
                             [&](const ScenarioRoute& r) { return r.announcement.prefix == spec.victim; })) {
                schema(base + "/victim", "route leak needs a legitimate route for the victim prefix");
            }
            s.attacks.push_back(std::move(spec));
        }
    }
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::MissingFile, path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return build_scenario(buf.str(), path.parent_path());
}

Scenario without_links(const Scenario& s)
{
    Scenario out = s;
    out.links.clear();
    return out;
}

Scenario isolate_defense(const Scenario& s, std::string_view defense)
{
    Scenario out = s;
    for (auto& ixp : out.ixps) {
        DefenseSet& d = ixp.policy.defenses;
        d.roa = defense == "roa";
        d.whitelist = defense == "whitelist";
        d.federation = defense == "federation";
        d.anomaly = defense == "anomaly";
    }
    return out;
}

std::string detection_rate_text(std::uint64_t detected, std::uint64_t injected)
{
    if (injected == 0) return "0.000";
    const std::uint64_t milli = (detected * 2000 + injected) / (2 * injected);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu.%03llu", static_cast<unsigned long long>(milli / 1000),
                  static_cast<unsigned long long>(milli % 1000));
    return buf;
}

RunResult run(const Scenario& s)
{
    std::map<IxpId, Endpoint> endpoints;
    for (const auto& ixp : s.ixps) {
        Endpoint& ep = endpoints[ixp.id];
        ep.history = std::make_unique<ObservationHistory>();
        ep.node = std::make_unique<FederationNode>(ixp.id, *ep.history, *ixp.whitelist);
        ep.client = std::make_unique<LoopbackFederationClient>(*ep.node);
    }
    for (const auto& link : s.links) {
        Endpoint& a = endpoints.at(link.a);
        Endpoint& b = endpoints.at(link.b);
        a.node->add_peer(link.b, link.key);
        b.node->add_peer(link.a, link.key);
        a.client->connect(*b.node);
        b.client->connect(*a.node);
        a.linked = b.linked = true;
    }
    for (const auto& ixp : s.ixps) {
        Endpoint& ep = endpoints.at(ixp.id);
        ep.engine = std::make_unique<Engine>(ixp.id, ixp.roas.get(), ixp.whitelist.get(), *ep.history, ixp.policy,
                                             ep.linked ? ep.client.get() : nullptr);
    }

    // Event order: shuffled legitimate routes with attacks spliced in.
    std::vector<std::size_t> order(s.routes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    seeded_shuffle(order, s.seed);
    std::vector<std::size_t> attack_order(s.attacks.size());
    for (std::size_t i = 0; i < attack_order.size(); ++i) attack_order[i] = i;
    std::stable_sort(attack_order.begin(), attack_order.end(), [&](std::size_t x, std::size_t y) {
        return s.attacks[x].inject_at < s.attacks[y].inject_at;
    });

    struct Pending {
        IxpId ixp;
        RouteAnnouncement ann;
        std::optional<AttackKind> attack;
    };
    std::vector<Pending> sequence;
    sequence.reserve(order.size() + attack_order.size());
    std::size_t next_attack = 0;
    auto splice_attacks = [&] {
        while (next_attack < attack_order.size() &&
               s.attacks[attack_order[next_attack]].inject_at <= sequence.size()) {
            const AttackSpec& a = s.attacks[attack_order[next_attack++]];
            sequence.push_back(Pending{a.entry, make_attack(s, a), a.kind});
        }
    };
    for (std::size_t idx : order) {
        splice_attacks();
        sequence.push_back(Pending{s.routes[idx].home, s.routes[idx].announcement, std::nullopt});
    }
    while (next_attack < attack_order.size()) {
        const AttackSpec& a = s.attacks[attack_order[next_attack++]];
        sequence.push_back(Pending{a.entry, make_attack(s, a), a.kind});
    }

    RunResult out;
    out.events.reserve(sequence.size());
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        Pending& p = sequence[i];
        Endpoint& ep = endpoints.at(p.ixp);
        SimEvent ev;
        ev.index = i;
        ev.ixp = p.ixp;
        ev.attack = p.attack;
        ev.result = ep.engine->process(p.ann);
        ev.announcement = std::move(p.ann);
        if (ep.linked) ep.client->push({ev.announcement});

        RunMetrics& m = out.metrics;
        const bool alarmed = ev.result.verdict.action != Action::Accept;
        if (ev.attack) {
            const auto k = static_cast<std::size_t>(*ev.attack);
            ++m.injected[k];
            if (alarmed) ++m.detected[k];
            const auto& evidence = ev.result.verdict.evidence;
            if (evidence && evidence->federation && evidence->federation->state == CrossState::Disputed) {
                ++m.disputed_on_attacks;
            }
        } else {
            ++m.legitimate;
            if (alarmed) ++m.false_positives;
        }

        out.event_log += "event=" + std::to_string(i) + " ixp=" + ev.ixp.str() + " label=";
        out.event_log += ev.attack ? std::string(to_string(*ev.attack)) : std::string("legitimate");
        out.event_log += " path=";
        const std::string path = ev.announcement.as_path.str();
        for (char c : path) out.event_log += c == ' ' ? '_' : c;
        out.event_log += ' ' + format_verdict_line(ev.result.verdict);
        out.event_log += ev.result.queried ? " queried=1" : " queried=0";
        out.event_log += " directive=";
        out.event_log += ev.result.directive ? std::string(to_string(ev.result.directive->directive)) : "-";
        out.event_log += '\n';
        out.events.push_back(std::move(ev));
    }

    for (const auto& ev : out.events) {
        if (!ev.attack) continue;
        for (std::size_t j = ev.index; j < out.events.size(); ++j) {
            const SimEvent& later = out.events[j];
            if (later.announcement.prefix == ev.announcement.prefix &&
                later.result.verdict.action != Action::Accept) {
                out.metrics.detection_latency.push_back(j - ev.index);
                break;
            }
        }
    }
    return out;
}

std::string report(const RunMetrics& m, ReportFormat format)
{
    if (format == ReportFormat::Json) {
        json injected = json::object();
        json detected = json::object();
        for (AttackKind k : kAttackKinds) {
            injected[std::string(to_string(k))] = m.injected_of(k);
            detected[std::string(to_string(k))] = m.detected_of(k);
        }
        json j;
        j["injected"] = std::move(injected);
        j["detected"] = std::move(detected);
        j["legitimate"] = m.legitimate;
        j["false_positives"] = m.false_positives;
        j["disputed_on_attacks"] = m.disputed_on_attacks;
        j["detection_latency"] = m.detection_latency;
        return j.dump(2) + "\n";
    }

    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-20s %9s %9s %7s\n", "attack kind", "injected", "detected", "rate");
    out += line;
    for (AttackKind k : kAttackKinds) {
        const std::string name = std::string(to_string(k)) + (k == AttackKind::RouteLeak ? "*" : "");
        std::snprintf(line, sizeof line, "%-20s %9llu %9llu %7s\n", name.c_str(),
                      static_cast<unsigned long long>(m.injected_of(k)),
                      static_cast<unsigned long long>(m.detected_of(k)),
                      detection_rate_text(m.detected_of(k), m.injected_of(k)).c_str());
        out += line;
    }
    out += "legitimate events: " + std::to_string(m.legitimate) + "\n";
    out += "false positives: " + std::to_string(m.false_positives) + "\n";
    out += "disputed on attacks: " + std::to_string(m.disputed_on_attacks) + "\n";
    out += "* no dedicated route-leak defense; a detection is an anomaly flag\n";
    return out;
}

RunMetrics parse_metrics(std::string_view json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        schema("/", e.what());
    }
    auto count = [&](const json& parent, const std::string& key, const std::string& path) -> std::uint64_t {
        if (!parent.is_object() || !parent.contains(key) || !parent[key].is_number_unsigned()) {
            schema(path, "count required");
        }
        return parent[key].get<std::uint64_t>();
    };
    RunMetrics m;
    for (AttackKind k : kAttackKinds) {
        const std::string name(to_string(k));
        const auto idx = static_cast<std::size_t>(k);
        m.injected[idx] = count(j.value("injected", json()), name, "/injected/" + name);
        m.detected[idx] = count(j.value("detected", json()), name, "/detected/" + name);
        if (m.detected[idx] > m.injected[idx]) schema("/detected/" + name, "exceeds injected");
    }
    m.legitimate = count(j, "legitimate", "/legitimate");
    m.false_positives = count(j, "false_positives", "/false_positives");
    m.disputed_on_attacks = count(j, "disputed_on_attacks", "/disputed_on_attacks");
    if (!j.contains("detection_latency") || !j["detection_latency"].is_array()) {
        schema("/detection_latency", "array required");
    }
    for (const auto& v : j["detection_latency"]) {
        if (!v.is_number_unsigned()) schema("/detection_latency", "counts required");
        m.detection_latency.push_back(v.get<std::uint64_t>());
    }
    return m;
}

}  // namespace bgpsecx
