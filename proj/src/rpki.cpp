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

#include "bgpsecx/rpki.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bgpsecx/error.hpp"

namespace bgpsecx {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

}  // namespace

RoaStore::RoaStore() = default;

RoaStore::RoaStore(std::vector<Roa> roas) : roas_(std::move(roas))
{
    for (const auto& roa : roas_) {
        if (roa.max_length < roa.prefix.length() || roa.max_length > max_length(roa.prefix.afi())) {
            throw Error(Errc::SchemaError, "ROA " + roa.prefix.str() + " max length " +
                                               std::to_string(roa.max_length) + " out of range");
        }
    }
    std::sort(roas_.begin(), roas_.end());
    roas_.erase(std::unique(roas_.begin(), roas_.end()), roas_.end());
    for (std::uint32_t i = 0; i < roas_.size(); ++i) insert(i);
}

void RoaStore::insert(std::uint32_t index)
{
    const IpPrefix& p = roas_[index].prefix;
    auto& root = roots_[p.afi() == Afi::IPv4 ? 0 : 1];
    if (root < 0) {
        root = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();
    }
    std::int32_t node = root;
    for (unsigned depth = 0; depth < p.length(); ++depth) {
        const int b = p.bit(depth);
        if (nodes_[node].child[b] < 0) {
            nodes_[node].child[b] = static_cast<std::int32_t>(nodes_.size());
            nodes_.emplace_back();
        }
        node = nodes_[node].child[b];
    }
    // Indices are inserted in ascending order, so each node's list stays sorted.
    nodes_[node].roas.push_back(index);
}

std::vector<Roa> RoaStore::covering(const IpPrefix& p) const
{
    std::vector<std::uint32_t> idx;
    for_each_covering(p, [&](std::uint32_t i) {
        idx.push_back(i);
        return true;
    });
    std::sort(idx.begin(), idx.end());
    std::vector<Roa> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(roas_[i]);
    return out;
}

bool RoaStore::has_covering(const IpPrefix& p) const
{
    bool found = false;
    for_each_covering(p, [&](std::uint32_t) {
        found = true;
        return false;
    });
    return found;
}

std::string_view to_string(ValidationState s) noexcept
{
    switch (s) {
    case ValidationState::Valid: return "Valid";
    case ValidationState::Invalid: return "Invalid";
    case ValidationState::NotFound: return "NotFound";
    }
    return "NotFound";
}

OriginValidationOutcome validate_origin(const RoaStore& store, const IpPrefix& prefix,
                                        const OriginResult& origin)
{
    OriginValidationOutcome out;
    out.covering = store.covering(prefix);
    if (origin) {
        for (const auto& roa : out.covering) {
            if (prefix.length() <= roa.max_length && roa.origin == *origin) out.matched.push_back(roa);
        }
    }
    if (!out.matched.empty()) {
        out.state = ValidationState::Valid;
    } else if (!out.covering.empty()) {
        out.state = ValidationState::Invalid;
    } else {
        out.state = ValidationState::NotFound;
    }
    return out;
}

RoaLoadResult load_roa_csv(std::string_view text)
{
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
        text.remove_prefix(3);
    }
    std::vector<Roa> roas;
    RoaLoadResult result;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string_view line = trim(raw);
        if (!header_seen) {
            if (line != kRoaCsvHeader) {
                throw Error(Errc::MissingHeader, "expected '" + std::string(kRoaCsvHeader) + "' on line 1");
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;

        const auto fields = split_csv(line);
        if (fields.size() != 4) {
            result.errors.push_back({line_no, "expected 4 fields, got " + std::to_string(fields.size())});
            continue;
        }
        const auto asn = parse_asn(fields[0]);
        if (!asn) {
            result.errors.push_back({line_no, "bad ASN '" + std::string(fields[0]) + "'"});
            continue;
        }
        const auto prefix = IpPrefix::try_parse(fields[1]);
        if (!prefix) {
            result.errors.push_back({line_no, "bad prefix '" + std::string(fields[1]) + "'"});
            continue;
        }
        unsigned max_len = 0;
        auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), max_len);
        if (fields[2].empty() || ec != std::errc{} || ptr != fields[2].data() + fields[2].size()) {
            result.errors.push_back({line_no, "bad max length '" + std::string(fields[2]) + "'"});
            continue;
        }
        if (max_len < prefix->length() || max_len > max_length(prefix->afi())) {
            result.errors.push_back({line_no, "max length " + std::to_string(max_len) +
                                                  " outside [" + std::to_string(prefix->length()) + ", " +
                                                  std::to_string(max_length(prefix->afi())) + "]"});
            continue;
        }
        roas.push_back(Roa{*prefix, max_len, *asn, std::string(fields[3])});
    }
    if (!header_seen) throw Error(Errc::MissingHeader, "empty ROA file");
    result.store = RoaStore(std::move(roas));
    return result;
}

RoaLoadResult load_roa_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_roa_csv(buf.str());
}

std::string CoverageStats::fraction_text(unsigned decimals) const
{
    std::uint64_t scale = 1;
    for (unsigned i = 0; i < decimals; ++i) scale *= 10;
    const std::uint64_t scaled = total == 0 ? 0 : (covered * scale * 2 + total) / (2 * total);
    std::string digits = std::to_string(scaled % scale);
    digits.insert(0, decimals - std::min<std::size_t>(decimals, digits.size()), '0');
    return std::to_string(scaled / scale) + (decimals ? "." + digits : "");
}

CoverageStats coverage_stats(const RoaStore& store, std::span<const IpPrefix> universe)
{
    if (universe.empty()) throw Error(Errc::EmptyUniverse, "coverage over an empty universe");
    CoverageStats stats;
    stats.total = universe.size();
    for (const auto& p : universe) {
        if (store.has_covering(p)) ++stats.covered;
    }
    return stats;
}

CoverageStats coverage_stats(const RoaStore& store,
                             std::span<const std::pair<IpPrefix, OriginResult>> routes)
{
    if (routes.empty()) throw Error(Errc::EmptyUniverse, "coverage over an empty universe");
    CoverageStats stats;
    stats.total = routes.size();
    for (const auto& [prefix, origin] : routes) {
        switch (validate_origin(store, prefix, origin).state) {
        case ValidationState::Valid:
            ++stats.valid;
            ++stats.covered;
            break;
        case ValidationState::Invalid:
            ++stats.invalid;
            ++stats.covered;
            break;
        case ValidationState::NotFound:
            ++stats.not_found;
            break;
        }
    }
    return stats;
}

}  // namespace bgpsecx
