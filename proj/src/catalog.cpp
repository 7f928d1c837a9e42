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

#include "bgpsecx/catalog.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "bgpsecx/crypto.hpp"
#include "bgpsecx/error.hpp"

#ifndef BGPSECX_DATA_DIR
#define BGPSECX_DATA_DIR "data"
#endif

namespace bgpsecx {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& why)
{
    throw Error(Errc::SchemaError, "manifest " + path + ": " + why);
}

std::string string_field(const json& j, const char* name, const std::string& path)
{
    if (!j.is_object() || !j.contains(name) || !j[name].is_string()) schema(path + "/" + name, "string required");
    return j[name].get<std::string>();
}

std::uint64_t count_field(const json& j, const char* name, const std::string& path)
{
    if (!j.is_object() || !j.contains(name) || !j[name].is_number_unsigned()) {
        schema(path + "/" + name, "count required");
    }
    return j[name].get<std::uint64_t>();
}

FixtureManifest parse_entry(const json& e, const std::string& path)
{
    FixtureManifest m;
    m.id = string_field(e, "id", path);
    m.description = e.value("description", std::string());
    m.entry = string_field(e, "entry", path);
    if (e.contains("roas")) m.roas = string_field(e, "roas", path);
    if (e.contains("whitelist")) m.whitelist = string_field(e, "whitelist", path);
    if (!e.contains("files") || !e["files"].is_array()) schema(path + "/files", "array required");
    for (std::size_t i = 0; i < e["files"].size(); ++i) {
        const std::string fpath = path + "/files/" + std::to_string(i);
        const json& f = e["files"][i];
        m.files.push_back(FixtureFile{string_field(f, "path", fpath), string_field(f, "sha256", fpath)});
    }
    if (!e.contains("expected") || !e["expected"].is_object()) schema(path + "/expected", "object required");
    const json& x = e["expected"];
    const std::string xpath = path + "/expected";
    if (x.contains("attack")) {
        ScenarioExpectation s;
        auto kind = parse_attack_kind(string_field(x, "attack", xpath));
        if (!kind) schema(xpath + "/attack", "unknown attack kind");
        s.attack = *kind;
        s.defense = string_field(x, "defense", xpath);
        const std::string action = string_field(x, "action", xpath);
        if (action == "Reject") {
            s.action = Action::Reject;
        } else if (action == "Flag") {
            s.action = Action::Flag;
        } else {
            schema(xpath + "/action", "Reject or Flag required");
        }
        if (!x.contains("reasons") || !x["reasons"].is_array()) schema(xpath + "/reasons", "array required");
        for (const auto& r : x["reasons"]) {
            if (!r.is_string()) schema(xpath + "/reasons", "strings required");
            s.reasons.push_back(r.get<std::string>());
        }
        s.injected = count_field(x, "injected", xpath);
        s.detected = count_field(x, "detected", xpath);
        s.false_positives = count_field(x, "false_positives", xpath);
        m.scenario = std::move(s);
    } else {
        TraceExpectation t;
        t.announcements = count_field(x, "announcements", xpath);
        if (x.contains("accept")) t.accept = count_field(x, "accept", xpath);
        if (x.contains("reject")) t.reject = count_field(x, "reject", xpath);
        if (x.contains("flag")) t.flag = count_field(x, "flag", xpath);
        m.trace = t;
    }
    return m;
}

}  // namespace

std::filesystem::path default_data_dir()
{
    if (const char* env = std::getenv("BGPSECX_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return BGPSECX_DATA_DIR;
}

std::vector<FixtureManifest> load_manifest(const std::filesystem::path& data_dir)
{
    const auto path = data_dir / "manifest.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::exception& e) {
        schema("/", e.what());
    }
    if (!doc.is_object() || !doc.contains("fixtures") || !doc["fixtures"].is_array()) {
        schema("/fixtures", "array required");
    }
    std::vector<FixtureManifest> out;
    for (std::size_t i = 0; i < doc["fixtures"].size(); ++i) {
        out.push_back(parse_entry(doc["fixtures"][i], "/fixtures/" + std::to_string(i)));
    }
    return out;
}

std::vector<FixtureManifest> scenario_catalog(const std::filesystem::path& data_dir)
{
    std::vector<FixtureManifest> out;
    for (auto& m : load_manifest(data_dir)) {
        if (m.scenario) out.push_back(std::move(m));
    }
    return out;
}

std::vector<std::string> verify_digests(const FixtureManifest& m, const std::filesystem::path& data_dir)
{
    std::vector<std::string> problems;
    for (const auto& f : m.files) {
        try {
            const std::string actual = to_hex(sha256_file(data_dir / f.path));
            if (actual != f.sha256) problems.push_back(f.path + ": digest " + actual + " != " + f.sha256);
        } catch (const Error& e) {
            problems.push_back(f.path + ": " + e.what());
        }
    }
    return problems;
}

}  // namespace bgpsecx
