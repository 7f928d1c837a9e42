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

#include "bgpsecx/model.hpp"

#include <charconv>

#include "bgpsecx/error.hpp"

namespace bgpsecx {

std::optional<Asn> parse_asn(std::string_view text) noexcept
{
    if (text.size() > 2 && (text[0] == 'A' || text[0] == 'a') && (text[1] == 'S' || text[1] == 's')) {
        text.remove_prefix(2);
    }
    if (text.empty() || text.size() > 10) return std::nullopt;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || v > 0xFFFFFFFFull) return std::nullopt;
    return Asn{static_cast<std::uint32_t>(v)};
}

std::string to_string(Asn asn) { return std::to_string(asn.value); }

AsPath AsPath::sequence(std::initializer_list<std::uint32_t> asns)
{
    AsPath path;
    if (asns.size() == 0) return path;
    PathSegment seg;
    for (auto a : asns) seg.asns.push_back(Asn{a});
    path.segments.push_back(std::move(seg));
    return path;
}

AsPath AsPath::sequence(const std::vector<Asn>& asns)
{
    AsPath path;
    if (!asns.empty()) path.segments.push_back(PathSegment{SegmentType::Sequence, asns});
    return path;
}

std::string AsPath::str() const
{
    std::string out;
    for (const auto& seg : segments) {
        if (!out.empty()) out += ' ';
        if (seg.type == SegmentType::Set) {
            out += '{';
            for (std::size_t i = 0; i < seg.asns.size(); ++i) {
                if (i) out += ',';
                out += to_string(seg.asns[i]);
            }
            out += '}';
        } else {
            for (std::size_t i = 0; i < seg.asns.size(); ++i) {
                if (i) out += ' ';
                out += to_string(seg.asns[i]);
            }
        }
    }
    return out;
}

OriginResult origin_of(const AsPath& path) noexcept
{
    if (path.segments.empty()) return std::nullopt;
    const auto& last = path.segments.back();
    if (last.type != SegmentType::Sequence || last.asns.empty()) return std::nullopt;
    return last.asns.back();
}

std::string to_string(const OriginResult& origin)
{
    return origin ? to_string(*origin) : std::string("indeterminate");
}

bool IxpId::is_valid(std::string_view text) noexcept
{
    if (text.empty() || text.size() > 32) return false;
    for (char c : text) {
        if (c < 0x21 || c > 0x7E) return false;
    }
    return true;
}

IxpId IxpId::make(std::string_view text)
{
    if (!is_valid(text)) {
        throw Error(Errc::InvalidIxpId, "'" + std::string(text) + "' must be 1-32 printable ASCII octets");
    }
    IxpId id;
    id.value_ = std::string(text);
    return id;
}

}  // namespace bgpsecx
