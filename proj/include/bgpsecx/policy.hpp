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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bgpsecx/anomaly.hpp"
#include "bgpsecx/federation.hpp"
#include "bgpsecx/model.hpp"
#include "bgpsecx/rpki.hpp"
#include "bgpsecx/whitelist.hpp"

namespace bgpsecx {

enum class Action : std::uint8_t { Accept, Reject, Flag };
enum class QueryTrigger : std::uint8_t { Never, Suspicion, Always };
enum class DirectiveKind : std::uint8_t { Drop, Quarantine };

std::string_view to_string(Action a) noexcept;
std::string_view to_string(QueryTrigger t) noexcept;
std::string_view to_string(DirectiveKind d) noexcept;

/// Evidence test a rule fires on.
enum class Condition : std::uint8_t {
    RoaInvalid,
    WhitelistViolation,
    FederationDisputed,
    AnomalyCritical,
    Anomaly,  // any Warning or Info alarm
    WhitelistNoPolicy,
    Always,
};

struct Rule {
    std::string id;
    Condition when = Condition::Always;
    /// Ignored for WhitelistNoPolicy, which takes PolicyConfig::treat_no_policy_as.
    Action action = Action::Accept;

    friend bool operator==(const Rule&, const Rule&) = default;
};

/// roa-invalid, whitelist-violation, federation-disputed, anomaly-critical,
/// anomaly, whitelist-no-policy, default.
std::vector<Rule> default_rules();

/// Which defenses run. A disabled defense contributes neutral evidence
/// (roa NotFound, whitelist NoPolicy, no federation query, no alarms).
struct DefenseSet {
    bool roa = true;
    bool whitelist = true;
    bool federation = true;
    bool anomaly = true;

    friend bool operator==(const DefenseSet&, const DefenseSet&) = default;
};

struct PolicyConfig {
    std::vector<Rule> rules = default_rules();
    Action treat_no_policy_as = Action::Accept;
    QueryTrigger query_federation_on = QueryTrigger::Suspicion;
    QuorumPolicy quorum;
    AnomalyParams anomaly;
    std::optional<std::uint32_t> ttl_seconds = 3600;
    DefenseSet defenses;
};

/// JSON policy document; every field optional:
///   {"treat_no_policy_as": "Accept"|"Flag",
///    "query_federation_on": "Never"|"Suspicion"|"Always",
///    "min_responders": 2, "quorum": [1, 2],
///    "stability_window": 86400, "warmup_observations": 1000,
///    "ttl_seconds": 3600 | null,
///    "defenses": {"roa": true, "whitelist": true, "federation": true, "anomaly": true}}
/// Throws Error(SchemaError).
PolicyConfig load_policy_config(std::string_view document);
PolicyConfig load_policy_config_file(const std::filesystem::path& path);

struct DefenseEvidence {
    OriginValidationOutcome roa;
    FilterResult whitelist;
    std::optional<CrossValidation> federation;
    std::vector<Alarm> anomalies;

    friend bool operator==(const DefenseEvidence&, const DefenseEvidence&) = default;
};

struct Verdict {
    Action action = Action::Accept;
    std::vector<std::string> reasons;
    RouteAnnouncement announcement;
    /// Absent for withdrawals, which bypass the defenses.
    std::optional<DefenseEvidence> evidence;
};

struct FilterDirective {
    Asn member;
    IpPrefix prefix;
    DirectiveKind directive = DirectiveKind::Drop;
    std::optional<std::uint32_t> ttl_seconds;

    friend bool operator==(const FilterDirective&, const FilterDirective&) = default;
};

bool rule_matches(Condition c, const DefenseEvidence& ev);

/// First matching rule decides the action. Reasons are the ids of every
/// matching rule that yields that same action, in table order, and are
/// empty for Accept.
Verdict evaluate(const RouteAnnouncement& ann, const DefenseEvidence& ev, const PolicyConfig& cfg);

/// Reject -> Drop, Flag -> Quarantine, Accept -> nothing.
std::optional<FilterDirective> emit_directive(const Verdict& v, const PolicyConfig& cfg);

struct ProcessResult {
    Verdict verdict;
    std::optional<FilterDirective> directive;
    bool queried = false;
};

/// One IXP's pipeline: roa -> whitelist -> anomaly detection -> optional
/// federation query -> evaluate -> record_observation -> directive.
/// Mutates only the history.
class Engine {
public:
    /// `roas` and `whitelist` may be null (treated as empty). The history
    /// and client must outlive the engine.
    Engine(IxpId self, const RoaStore* roas, const Whitelist* whitelist, ObservationHistory& history,
           PolicyConfig cfg, FederationClient* federation = nullptr);

    ProcessResult process(const RouteAnnouncement& ann);

    const PolicyConfig& config() const noexcept { return cfg_; }
    const IxpId& self() const noexcept { return self_; }
    ObservationHistory& history() noexcept { return history_; }
    std::uint64_t federation_errors() const noexcept { return federation_errors_; }

private:
    bool should_query(const DefenseEvidence& ev) const;

    IxpId self_;
    const RoaStore* roas_;
    const Whitelist* whitelist_;
    ObservationHistory& history_;
    PolicyConfig cfg_;
    FederationClient* federation_;
    std::uint64_t federation_errors_ = 0;
};

/// One key=value line per verdict:
///   ts=.. member=.. prefix=.. origin=.. roa=.. whitelist=.. federation=..
///   alarms=.. action=.. reasons=..
/// federation renders as State/agreeing/responders or "-"; alarms as
/// Kind:Severity joined by commas, or "-".
std::string format_verdict_line(const Verdict& v);

/// Evidence rebuilt from a verdict line: enough for evaluate() to reproduce
/// the logged action and reasons (ROA and alarm details are not logged).
struct LoggedVerdict {
    RouteAnnouncement announcement;  // prefix, member, timestamp and a one-hop path carrying the origin
    DefenseEvidence evidence;
    Action action = Action::Accept;
    std::vector<std::string> reasons;
};

/// Throws Error(SchemaError).
LoggedVerdict parse_verdict_line(std::string_view line);

/// "alarm ts=.. kind=.. prefix=.. detail=.. severity=.."
std::string format_alarm_line(const Alarm& a);

}  // namespace bgpsecx
