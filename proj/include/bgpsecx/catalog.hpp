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
#include <vector>

#include "bgpsecx/policy.hpp"
#include "bgpsecx/simulator.hpp"

namespace bgpsecx {

struct FixtureFile {
    std::string path;    // relative to the data directory
    std::string sha256;  // lowercase hex
};

struct ScenarioExpectation {
    AttackKind attack = AttackKind::ExactPrefixHijack;
    /// The defense the scenario exercises ("roa", "whitelist", "federation", "anomaly").
    std::string defense;
    Action action = Action::Reject;
    std::vector<std::string> reasons;
    std::uint64_t injected = 0;
    std::uint64_t detected = 0;
    std::uint64_t false_positives = 0;
};

struct TraceExpectation {
    std::uint64_t announcements = 0;
    // Verdict counts, for traces shipped with ROAs and a whitelist.
    std::optional<std::uint64_t> accept;
    std::optional<std::uint64_t> reject;
    std::optional<std::uint64_t> flag;
};

struct FixtureManifest {
    std::string id;
    std::string description;
    std::vector<FixtureFile> files;
    /// Scenario document or MRT trace the fixture is run from.
    std::string entry;
    // Trace fixtures only.
    std::optional<std::string> roas;
    std::optional<std::string> whitelist;
    std::optional<ScenarioExpectation> scenario;
    std::optional<TraceExpectation> trace;
};

/// data/ in the source tree, or $BGPSECX_DATA_DIR when set.
std::filesystem::path default_data_dir();

/// Parses <data_dir>/manifest.json. Throws Error(SchemaError | Io).
std::vector<FixtureManifest> load_manifest(const std::filesystem::path& data_dir);

/// The scenario fixtures S1-S4, one per defense.
std::vector<FixtureManifest> scenario_catalog(const std::filesystem::path& data_dir = default_data_dir());

/// One message per file whose digest differs or that cannot be read; empty
/// when everything matches.
std::vector<std::string> verify_digests(const FixtureManifest& m, const std::filesystem::path& data_dir);

}  // namespace bgpsecx
