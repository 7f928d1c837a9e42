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

#include "bgpsecx/policy.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "json.hpp"

#include "bgpsecx/error.hpp"

namespace bgpsecx {

using nlohmann::json;

std::string_view to_string(Action a) noexcept
{
    switch (a) {
    case Action::Accept: return "Accept";
    case Action::Reject: return "Reject";
    case Action::Flag: return "Flag";
    }
    return "Accept";
}

std::string_view to_string(QueryTrigger t) noexcept
{
    switch (t) {
    case QueryTrigger::Never: return "Never";
    case QueryTrigger::Suspicion: return "Suspicion";
    case QueryTrigger::Always: return "Always";
    }
    return "Never";
}

std::string_view to_string(DirectiveKind d) noexcept
{
    return d == DirectiveKind::Drop ? "Drop" : "Quarantine";
}

std::vector<Rule> default_rules()
{
    return {
        {"roa-invalid", Condition::RoaInvalid, Action::Reject},
        {"whitelist-violation", Condition::WhitelistViolation, Action::Reject},
        {"federation-disputed", Condition::FederationDisputed, Action::Flag},
        {"anomaly-critical", Condition::AnomalyCritical, Action::Flag},
        {"anomaly", Condition::Anomaly, Action::Flag},
        {"whitelist-no-policy", Condition::WhitelistNoPolicy, Action::Accept},
        {"default", Condition::Always, Action::Accept},
    };
}

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& why)
{
    throw Error(Errc::SchemaError, path + ": " + why);
}

template <typename Enum, std::size_t N>
Enum enum_field(const json& doc, const char* name, const std::array<Enum, N>& values)
{
    const json& v = doc[name];
    if (v.is_string()) {
        for (Enum e : values) {
            if (to_string(e) == v.get<std::string>()) return e;
        }
    }
    schema(std::string("/") + name, "unexpected value " + v.dump());
}

std::uint64_t unsigned_field(const json& doc, const char* name)
{
    if (!doc[name].is_number_unsigned()) schema(std::string("/") + name, "non-negative integer required");
    return doc[name].get<std::uint64_t>();
}

Action effective_action(const Rule& r, const PolicyConfig& cfg)
{
    return r.when == Condition::WhitelistNoPolicy ? cfg.treat_no_policy_as : r.action;
}

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<Enum, N>& values, const char* what)
{
    for (Enum e : values) {
        if (to_string(e) == text) return e;
    }
    throw Error(Errc::SchemaError, std::string("bad ") + what + " '" + std::string(text) + "'");
}

std::uint64_t parse_number(std::string_view text, const char* what)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(Errc::SchemaError, std::string("bad ") + what + " '" + std::string(text) + "'");
    }
    return v;
}

constexpr std::array kActions{Action::Accept, Action::Reject, Action::Flag};
constexpr std::array kTriggers{QueryTrigger::Never, QueryTrigger::Suspicion, QueryTrigger::Always};
constexpr std::array kValidation{ValidationState::Valid, ValidationState::Invalid, ValidationState::NotFound};
constexpr std::array kFilter{FilterState::Pass, FilterState::Violation, FilterState::NoPolicy};
constexpr std::array kCross{CrossState::Corroborated, CrossState::Disputed, CrossState::Unknown};
constexpr std::array kAlarmKinds{AlarmKind::Moas, AlarmKind::SubPrefix, AlarmKind::NewEdge};
constexpr std::array kSeverities{Severity::Info, Severity::Warning, Severity::Critical};

}  // namespace

PolicyConfig load_policy_config(std::string_view document)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::exception& e) {
        schema("/", e.what());
    }
    if (!doc.is_object()) schema("/", "policy must be an object");

    PolicyConfig cfg;
    if (doc.contains("treat_no_policy_as")) {
        cfg.treat_no_policy_as = enum_field(doc, "treat_no_policy_as", kActions);
        if (cfg.treat_no_policy_as == Action::Reject) schema("/treat_no_policy_as", "must be Accept or Flag");
    }
    if (doc.contains("query_federation_on")) {
        cfg.query_federation_on = enum_field(doc, "query_federation_on", kTriggers);
    }
    if (doc.contains("min_responders")) cfg.quorum.min_responders = unsigned_field(doc, "min_responders");
    if (doc.contains("quorum")) {
        const json& q = doc["quorum"];
        if (!q.is_array() || q.size() != 2 || !q[0].is_number_unsigned() || !q[1].is_number_unsigned() ||
            q[1].get<std::uint64_t>() == 0 || q[0].get<std::uint64_t>() > q[1].get<std::uint64_t>() ||
            q[1].get<std::uint64_t>() > 0xFFFFFFFFull) {
            schema("/quorum", "[numerator, denominator] with 0 <= numerator <= denominator, denominator > 0");
        }
        cfg.quorum.quorum_numerator = q[0].get<std::uint32_t>();
        cfg.quorum.quorum_denominator = q[1].get<std::uint32_t>();
    }
    if (doc.contains("stability_window")) {
        cfg.anomaly.stability_window = static_cast<std::int64_t>(unsigned_field(doc, "stability_window"));
    }
    if (doc.contains("warmup_observations")) {
        cfg.anomaly.warmup_observations = unsigned_field(doc, "warmup_observations");
    }
    if (doc.contains("ttl_seconds")) {
        if (doc["ttl_seconds"].is_null()) {
            cfg.ttl_seconds.reset();
        } else {
            const std::uint64_t ttl = unsigned_field(doc, "ttl_seconds");
            if (ttl > 0xFFFFFFFFull) schema("/ttl_seconds", "out of range");
            cfg.ttl_seconds = static_cast<std::uint32_t>(ttl);
        }
    }
    if (doc.contains("defenses")) {
        const json& d = doc["defenses"];
        if (!d.is_object()) schema("/defenses", "object required");
        for (const auto& [name, value] : d.items()) {
            if (!value.is_boolean()) schema("/defenses/" + name, "boolean required");
            const bool on = value.get<bool>();
            if (name == "roa") {
                cfg.defenses.roa = on;
            } else if (name == "whitelist") {
                cfg.defenses.whitelist = on;
            } else if (name == "federation") {
                cfg.defenses.federation = on;
            } else if (name == "anomaly") {
                cfg.defenses.anomaly = on;
            } else {
                schema("/defenses/" + name, "unknown defense");
            }
        }
    }
    return cfg;
}

PolicyConfig load_policy_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_policy_config(buf.str());
}

bool rule_matches(Condition c, const DefenseEvidence& ev)
{
    switch (c) {
    case Condition::RoaInvalid: return ev.roa.state == ValidationState::Invalid;
    case Condition::WhitelistViolation: return ev.whitelist.state == FilterState::Violation;
    case Condition::FederationDisputed:
        return ev.federation && ev.federation->state == CrossState::Disputed;
    case Condition::AnomalyCritical:
        return std::any_of(ev.anomalies.begin(), ev.anomalies.end(),
                           [](const Alarm& a) { return a.severity == Severity::Critical; });
    case Condition::Anomaly:
        return std::any_of(ev.anomalies.begin(), ev.anomalies.end(),
                           [](const Alarm& a) { return a.severity != Severity::Critical; });
    case Condition::WhitelistNoPolicy: return ev.whitelist.state == FilterState::NoPolicy;
    case Condition::Always: return true;
    }
    return false;
}

Verdict evaluate(const RouteAnnouncement& ann, const DefenseEvidence& ev, const PolicyConfig& cfg)
{
    Verdict v;
    v.announcement = ann;
    v.evidence = ev;
    const Rule* decider = nullptr;
    for (const auto& r : cfg.rules) {
        if (rule_matches(r.when, ev)) {
            decider = &r;
            break;
        }
    }
    v.action = decider ? effective_action(*decider, cfg) : Action::Accept;
    if (v.action == Action::Accept) return v;
    for (const auto& r : cfg.rules) {
        if (effective_action(r, cfg) == v.action && rule_matches(r.when, ev)) v.reasons.push_back(r.id);
    }
    return v;
}

std::optional<FilterDirective> emit_directive(const Verdict& v, const PolicyConfig& cfg)
{
    if (v.action == Action::Accept) return std::nullopt;
    FilterDirective d;
    d.member = v.announcement.announcing_member;
    d.prefix = v.announcement.prefix;
    d.directive = v.action == Action::Reject ? DirectiveKind::Drop : DirectiveKind::Quarantine;
    d.ttl_seconds = cfg.ttl_seconds;
    return d;
}

Engine::Engine(IxpId self, const RoaStore* roas, const Whitelist* whitelist, ObservationHistory& history,
               PolicyConfig cfg, FederationClient* federation)
    : self_(std::move(self)),
      roas_(roas),
      whitelist_(whitelist),
      history_(history),
      cfg_(std::move(cfg)),
      federation_(federation)
{
}

bool Engine::should_query(const DefenseEvidence& ev) const
{
    if (federation_ == nullptr || !cfg_.defenses.federation) return false;
    switch (cfg_.query_federation_on) {
    case QueryTrigger::Never: return false;
    case QueryTrigger::Always: return true;
    case QueryTrigger::Suspicion:
        return ev.roa.state == ValidationState::NotFound || !ev.anomalies.empty();
    }
    return false;
}

ProcessResult Engine::process(const RouteAnnouncement& ann)
{
    ProcessResult out;
    if (ann.kind != RouteKind::Announce) {
        out.verdict.announcement = ann;
        return out;
    }

    DefenseEvidence ev;
    const OriginResult origin = ann.origin();
    const bool use_roas = cfg_.defenses.roa && roas_ != nullptr;
    if (use_roas) ev.roa = validate_origin(*roas_, ann.prefix, origin);
    if (cfg_.defenses.whitelist && whitelist_ != nullptr) ev.whitelist = check_whitelist(*whitelist_, ann);
    if (cfg_.defenses.anomaly) {
        ev.anomalies = detect_anomalies(history_, ann, cfg_.anomaly, use_roas ? roas_ : nullptr);
    }
    if (should_query(ev)) {
        out.queried = true;
        try {
            ev.federation = cross_validate(ann, federation_->query(ann.prefix), cfg_.quorum);
        } catch (const Error& e) {
            ++federation_errors_;
            spdlog::debug("{}: federation unavailable for {}: {}", self_.str(), ann.prefix.str(), e.what());
        }
    }

    out.verdict = evaluate(ann, ev, cfg_);
    history_.record(ann, self_);
    out.directive = emit_directive(out.verdict, cfg_);
    return out;
}

std::string format_verdict_line(const Verdict& v)
{
    const RouteAnnouncement& a = v.announcement;
    std::string line;
    line.reserve(160);
    line += "ts=" + std::to_string(a.timestamp);
    line += a.kind == RouteKind::Announce ? " kind=announce" : " kind=withdraw";
    line += " member=" + to_string(a.announcing_member);
    line += " prefix=" + a.prefix.str();
    line += " origin=" + to_string(a.origin());
    if (v.evidence) {
        const DefenseEvidence& ev = *v.evidence;
        line += " roa=";
        line += to_string(ev.roa.state);
        line += " whitelist=";
        line += to_string(ev.whitelist.state);
        line += " federation=";
        if (ev.federation) {
            line += to_string(ev.federation->state);
            line += '/' + std::to_string(ev.federation->agreeing) + '/' + std::to_string(ev.federation->responders);
        } else {
            line += '-';
        }
        line += " alarms=";
        if (ev.anomalies.empty()) line += '-';
        for (std::size_t i = 0; i < ev.anomalies.size(); ++i) {
            if (i) line += ',';
            line += to_string(ev.anomalies[i].kind);
            line += ':';
            line += to_string(ev.anomalies[i].severity);
        }
    } else {
        line += " roa=- whitelist=- federation=- alarms=-";
    }
    line += " action=";
    line += to_string(v.action);
    line += " reasons=";
    if (v.reasons.empty()) line += '-';
    for (std::size_t i = 0; i < v.reasons.size(); ++i) {
        if (i) line += ',';
        line += v.reasons[i];
    }
    return line;
}

LoggedVerdict parse_verdict_line(std::string_view line)
{
    std::map<std::string, std::string> fields;
    for (const auto& token : split(line, ' ')) {
        if (token.empty()) continue;
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw Error(Errc::SchemaError, "token without '=': " + token);
        fields[token.substr(0, eq)] = token.substr(eq + 1);
    }
    for (const char* k : {"ts", "kind", "member", "prefix", "origin", "roa", "whitelist", "federation", "alarms",
                          "action", "reasons"}) {
        if (!fields.contains(k)) throw Error(Errc::SchemaError, std::string("missing field ") + k);
    }

    LoggedVerdict out;
    RouteAnnouncement& a = out.announcement;
    const std::string& ts = fields["ts"];
    try {
        a.timestamp = std::stoll(ts);
    } catch (const std::exception&) {
        throw Error(Errc::SchemaError, "bad ts '" + ts + "'");
    }
    a.kind = fields["kind"] == "withdraw" ? RouteKind::Withdraw : RouteKind::Announce;
    auto member = parse_asn(fields["member"]);
    if (!member) throw Error(Errc::SchemaError, "bad member");
    a.announcing_member = *member;
    a.prefix = IpPrefix::parse(fields["prefix"]);
    if (fields["origin"] == "indeterminate") {
        a.as_path.segments.push_back(PathSegment{SegmentType::Set, {a.announcing_member}});
    } else {
        auto origin = parse_asn(fields["origin"]);
        if (!origin) throw Error(Errc::SchemaError, "bad origin");
        a.as_path = AsPath::sequence(std::vector<Asn>{*origin});
    }

    out.action = parse_enum(fields["action"], kActions, "action");
    if (fields["reasons"] != "-") out.reasons = split(fields["reasons"], ',');

    DefenseEvidence& ev = out.evidence;
    if (fields["roa"] != "-") ev.roa.state = parse_enum(fields["roa"], kValidation, "roa state");
    if (fields["whitelist"] != "-") ev.whitelist.state = parse_enum(fields["whitelist"], kFilter, "whitelist state");
    if (fields["federation"] != "-") {
        const auto parts = split(fields["federation"], '/');
        if (parts.size() != 3) throw Error(Errc::SchemaError, "bad federation field");
        CrossValidation cv;
        cv.state = parse_enum(parts[0], kCross, "federation state");
        cv.agreeing = parse_number(parts[1], "agreeing");
        cv.responders = parse_number(parts[2], "responders");
        ev.federation = cv;
    }
    if (fields["alarms"] != "-") {
        for (const auto& item : split(fields["alarms"], ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) throw Error(Errc::SchemaError, "bad alarm '" + item + "'");
            Alarm alarm;
            alarm.kind = parse_enum(std::string_view(item).substr(0, colon), kAlarmKinds, "alarm kind");
            alarm.severity = parse_enum(std::string_view(item).substr(colon + 1), kSeverities, "severity");
            alarm.prefix = a.prefix;
            alarm.timestamp = a.timestamp;
            ev.anomalies.push_back(std::move(alarm));
        }
    }
    return out;
}

std::string format_alarm_line(const Alarm& a)
{
    std::string detail;
    auto add = [&](const std::string& s) {
        if (!detail.empty()) detail += ',';
        detail += s;
    };
    for (Asn x : a.asns) add("AS" + to_string(x));
    for (const auto& p : a.prefixes) add(p.str());
    for (const auto& e : a.edges) add(to_string(e.low) + "-" + to_string(e.high));
    std::string line = "alarm ts=" + std::to_string(a.timestamp);
    line += " kind=";
    line += to_string(a.kind);
    line += " prefix=" + a.prefix.str();
    line += " detail=" + (detail.empty() ? std::string("-") : detail);
    line += " severity=";
    line += to_string(a.severity);
    return line;
}

}  // namespace bgpsecx
