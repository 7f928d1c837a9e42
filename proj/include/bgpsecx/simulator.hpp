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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bgpsecx/federation.hpp"
#include "bgpsecx/model.hpp"
#include "bgpsecx/policy.hpp"
#include "bgpsecx/rpki.hpp"
#include "bgpsecx/whitelist.hpp"

namespace bgpsecx {

enum class AttackKind : std::uint8_t { ExactPrefixHijack, SubPrefixHijack, RouteLeak };

inline constexpr std::array kAttackKinds{AttackKind::ExactPrefixHijack, AttackKind::SubPrefixHijack,
                                         AttackKind::RouteLeak};

std::string_view to_string(AttackKind k) noexcept;
std::optional<AttackKind> parse_attack_kind(std::string_view text) noexcept;

struct AttackSpec {
    AttackKind kind = AttackKind::ExactPrefixHijack;
    IpPrefix victim;
    Asn attacker;
    IxpId entry;
    /// Position in the merged event sequence.
    std::size_t inject_at = 0;
    /// Announcement time; defaults to the latest legitimate route time.
    std::optional<std::int64_t> time;
};

struct ScenarioIxp {
    IxpId id;
    std::shared_ptr<const RoaStore> roas;
    std::shared_ptr<const Whitelist> whitelist;
    PolicyConfig policy;
};

/// Federation link, stored with a < b.
struct ScenarioLink {
    IxpId a;
    IxpId b;
    Key key{};
};

struct ScenarioRoute {
    RouteAnnouncement announcement;
    IxpId home;
};

struct Scenario {
    std::vector<ScenarioIxp> ixps;
    std::vector<ScenarioLink> links;
    std::vector<ScenarioRoute> routes;
    std::vector<AttackSpec> attacks;
    std::uint64_t seed = 0;
};

/// Resolves a scenario document. Relative file references are taken from
/// `base_dir`.
///
///   {"seed": 7,
///    "ixps": [{"id": "ixp-a", "roas": "roas.csv", "whitelists": ["wl.json"],
///              "policy": {...policy document...}}],
///    "links": [["ixp-a", "ixp-b"], {"a": "ixp-a", "b": "ixp-c", "key": "<64 hex>"}],
///    "routes": [{"ixp": "ixp-a", "prefix": "192.0.2.0/24", "path": [65010, 65020],
///                "member": 65010, "time": 1700000000}],
///    "attacks": [{"kind": "ExactPrefixHijack", "victim": "192.0.2.0/24",
///                 "attacker": 64999, "ixp": "ixp-a", "at": 12}]}
///
/// Links without a key get one derived from the two IXP ids. Several
/// whitelists for one IXP are merged with merge_cluster.
/// Throws Error(UnknownIxp | AsymmetricLink | MissingFile | SchemaError |
/// InvalidIxpId).
Scenario build_scenario(std::string_view document, const std::filesystem::path& base_dir);
/// Throws Error(MissingFile) if the file is absent.
Scenario load_scenario_file(const std::filesystem::path& path);

/// Copy of `s` without federation links.
Scenario without_links(const Scenario& s);
/// Copy of `s` where every IXP runs only `defense` ("roa", "whitelist",
/// "federation" or "anomaly").
Scenario isolate_defense(const Scenario& s, std::string_view defense);

struct RunMetrics {
    std::array<std::uint64_t, 3> injected{};
    std::array<std::uint64_t, 3> detected{};
    std::uint64_t legitimate = 0;
    std::uint64_t false_positives = 0;
    /// Attack events whose federation result was Disputed.
    std::uint64_t disputed_on_attacks = 0;
    /// Per detected attack, in injection order: events from injection to the
    /// first Reject/Flag on the attacked prefix at any IXP.
    std::vector<std::uint64_t> detection_latency;

    std::uint64_t injected_of(AttackKind k) const { return injected[static_cast<std::size_t>(k)]; }
    std::uint64_t detected_of(AttackKind k) const { return detected[static_cast<std::size_t>(k)]; }

    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// detected / injected rounded half-up to 3 places ("0.000" when nothing was injected).
std::string detection_rate_text(std::uint64_t detected, std::uint64_t injected);

struct SimEvent {
    std::size_t index = 0;
    IxpId ixp;
    RouteAnnouncement announcement;
    std::optional<AttackKind> attack;
    ProcessResult result;
};

struct RunResult {
    std::vector<SimEvent> events;
    RunMetrics metrics;
    /// One line per event, stable field order.
    std::string event_log;
};

/// Single-threaded deterministic run: legitimate routes shuffled with the
/// seed, attacks spliced in at their indices, each event processed by its
/// IXP's engine and then pushed to linked peers.
RunResult run(const Scenario& s);

enum class ReportFormat : std::uint8_t { Json, Table };

std::string report(const RunMetrics& m, ReportFormat format);
/// Inverse of report(m, Json). Throws Error(SchemaError).
RunMetrics parse_metrics(std::string_view json_text);

}  // namespace bgpsecx
