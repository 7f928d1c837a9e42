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

#include "bgpsecx/whitelist.hpp"

#include <algorithm>
#include <fstream>
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

unsigned max_allowed_length(const WhitelistEntry& e)
{
    unsigned m = 0;
    for (const auto& p : e.allowed) m = std::max(m, p.length());
    return m;
}

}  // namespace

std::string_view to_string(FilterState s) noexcept
{
    switch (s) {
    case FilterState::Pass: return "Pass";
    case FilterState::Violation: return "Violation";
    case FilterState::NoPolicy: return "NoPolicy";
    }
    return "NoPolicy";
}

Whitelist load_whitelist(std::string_view document)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        schema("/", e.what());
    }
    if (!doc.is_object()) schema("/", "document must be an object");

    Whitelist wl;
    if (!doc.contains("ixp") || !doc["ixp"].is_string()) schema("/ixp", "required string");
    wl.source_ixp = doc["ixp"].get<std::string>();
    if (!doc.contains("version") || !doc["version"].is_number_unsigned()) {
        schema("/version", "required non-negative integer");
    }
    wl.version = doc["version"].get<std::uint64_t>();
    if (!doc.contains("members") || !doc["members"].is_array()) schema("/members", "required array");

    const auto& members = doc["members"];
    for (std::size_t i = 0; i < members.size(); ++i) {
        const std::string base = "/members/" + std::to_string(i);
        const auto& m = members[i];
        if (!m.is_object()) schema(base, "member must be an object");
        if (!m.contains("asn") || !m["asn"].is_number_unsigned() || m["asn"].get<std::uint64_t>() > 0xFFFFFFFFull) {
            schema(base + "/asn", "required 32-bit unsigned integer");
        }
        WhitelistEntry entry;
        entry.member = Asn{m["asn"].get<std::uint32_t>()};
        if (!m.contains("prefixes") || !m["prefixes"].is_array()) schema(base + "/prefixes", "required array");
        const auto& prefixes = m["prefixes"];
        for (std::size_t k = 0; k < prefixes.size(); ++k) {
            const std::string ppath = base + "/prefixes/" + std::to_string(k);
            if (!prefixes[k].is_string()) schema(ppath, "prefix must be a string");
            auto p = IpPrefix::try_parse(prefixes[k].get<std::string>());
            if (!p) schema(ppath, "invalid CIDR '" + prefixes[k].get<std::string>() + "'");
            entry.allowed.insert(*p);
        }
        if (m.contains("allow_more_specifics_up_to")) {
            const auto& v = m["allow_more_specifics_up_to"];
            if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 128) {
                schema(base + "/allow_more_specifics_up_to", "integer in [0, 128]");
            }
            entry.allow_more_specifics_up_to = v.get<unsigned>();
            if (*entry.allow_more_specifics_up_to < max_allowed_length(entry)) {
                schema(base + "/allow_more_specifics_up_to", "shorter than an allowed prefix");
            }
        }
        if (wl.entries.contains(entry.member)) {
            throw Error(Errc::DuplicateMember, "member " + to_string(entry.member) + " at " + base);
        }
        wl.entries.emplace(entry.member, std::move(entry));
    }
    return wl;
}

Whitelist load_whitelist_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_whitelist(buf.str());
}

std::string dump_whitelist(const Whitelist& wl)
{
    json members = json::array();
    for (const auto& [asn, entry] : wl.entries) {
        json m;
        m["asn"] = asn.value;
        json prefixes = json::array();
        for (const auto& p : entry.allowed) prefixes.push_back(p.str());
        m["prefixes"] = std::move(prefixes);
        if (entry.allow_more_specifics_up_to) m["allow_more_specifics_up_to"] = *entry.allow_more_specifics_up_to;
        members.push_back(std::move(m));
    }
    json doc;
    doc["ixp"] = wl.source_ixp;
    doc["version"] = wl.version;
    doc["members"] = std::move(members);
    return doc.dump();
}

FilterResult check_whitelist(const Whitelist& wl, const RouteAnnouncement& ann)
{
    const WhitelistEntry* entry = wl.find(ann.announcing_member);
    if (entry == nullptr) return {FilterState::NoPolicy, std::nullopt};

    if (entry->allowed.contains(ann.prefix)) return {FilterState::Pass, ann.prefix};
    const auto bound = entry->allow_more_specifics_up_to;
    if (bound && ann.prefix.length() <= *bound) {
        // Most specific covering allowed prefix first.
        for (unsigned len = ann.prefix.length(); len-- > 0;) {
            const IpPrefix candidate = ann.prefix.truncated(len);
            if (entry->allowed.contains(candidate)) return {FilterState::Pass, candidate};
        }
    }
    return {FilterState::Violation, std::nullopt};
}

Whitelist merge_cluster(std::span<const Whitelist> whitelists)
{
    Whitelist merged;
    merged.source_ixp = "cluster";
    for (const auto& wl : whitelists) {
        merged.version = std::max(merged.version, wl.version);
        for (const auto& [asn, entry] : wl.entries) {
            auto [it, inserted] = merged.entries.try_emplace(asn, WhitelistEntry{asn, {}, std::nullopt});
            auto& target = it->second;
            target.allowed.insert(entry.allowed.begin(), entry.allowed.end());
            if (entry.allow_more_specifics_up_to) {
                target.allow_more_specifics_up_to =
                    std::max(target.allow_more_specifics_up_to.value_or(0), *entry.allow_more_specifics_up_to);
            }
        }
    }
    for (auto& [asn, entry] : merged.entries) {
        if (entry.allow_more_specifics_up_to) {
            entry.allow_more_specifics_up_to = std::max(*entry.allow_more_specifics_up_to, max_allowed_length(entry));
        }
    }
    return merged;
}

}  // namespace bgpsecx
