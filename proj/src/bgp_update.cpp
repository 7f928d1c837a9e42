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

#include "bgpsecx/bgp_update.hpp"

#include <algorithm>
#include <array>

#include "bgpsecx/error.hpp"

namespace bgpsecx {

namespace {

constexpr std::uint16_t kAfiIpv4 = 1;
constexpr std::uint16_t kAfiIpv6 = 2;
constexpr std::uint8_t kSafiUnicast = 1;
constexpr std::uint32_t kAsTrans = 23456;

[[noreturn]] void malformed(std::uint8_t code, const std::string& why)
{
    throw Error(Errc::MalformedAttribute, "attribute " + std::to_string(code) + ": " + why);
}

std::optional<Afi> afi_from_wire(std::uint16_t afi)
{
    if (afi == kAfiIpv4) return Afi::IPv4;
    if (afi == kAfiIpv6) return Afi::IPv6;
    return std::nullopt;
}

AsPath parse_as_path(ByteView value, unsigned asn_size)
{
    AsPath path;
    std::size_t pos = 0;
    while (pos < value.size()) {
        if (value.size() - pos < 2) malformed(attr::kAsPath, "truncated segment header");
        const std::uint8_t type = value[pos];
        const std::uint8_t count = value[pos + 1];
        pos += 2;
        const std::size_t need = std::size_t{count} * asn_size;
        if (value.size() - pos < need) malformed(attr::kAsPath, "segment overruns attribute");
        if (type != 1 && type != 2 && type != 3 && type != 4) {
            malformed(attr::kAsPath, "unknown segment type " + std::to_string(type));
        }
        // Confederation segments (3, 4) are local to the confederation and
        // never carry the origin; empty segments carry nothing.
        if ((type == 1 || type == 2) && count > 0) {
            PathSegment seg;
            seg.type = type == 1 ? SegmentType::Set : SegmentType::Sequence;
            seg.asns.reserve(count);
            for (std::size_t i = 0; i < count; ++i) {
                std::uint32_t v = 0;
                for (unsigned k = 0; k < asn_size; ++k) v = (v << 8) | value[pos + i * asn_size + k];
                seg.asns.push_back(Asn{v});
            }
            path.segments.push_back(std::move(seg));
        }
        pos += need;
    }
    return path;
}

void parse_mp_reach(ByteView value, const AttributeContext& ctx, PathAttributes& out)
{
    if (ctx.rib_entry && !value.empty() && value[0] == value.size() - 1) {
        // Abbreviated RIB-entry form: next hop length and next hop only.
        out.mp_next_hop = Bytes(value.begin() + 1, value.begin() + 1 + std::min<std::size_t>(value[0], 16));
        return;
    }
    ByteReader r(value, Errc::MalformedAttribute);
    const std::uint16_t afi = r.u16();
    const std::uint8_t safi = r.u8();
    const std::uint8_t nh_len = r.u8();
    const ByteView nh = r.take(nh_len);
    r.skip(1);  // reserved
    const auto family = afi_from_wire(afi);
    if (!family || safi != kSafiUnicast) {
        ++out.skipped;
        return;
    }
    out.mp_next_hop = Bytes(nh.begin(), nh.begin() + std::min<std::size_t>(nh.size(), 16));
    auto prefixes = decode_nlri(r.take(r.remaining()), *family);
    out.mp_nlri.insert(out.mp_nlri.end(), prefixes.begin(), prefixes.end());
}

void parse_mp_unreach(ByteView value, PathAttributes& out)
{
    ByteReader r(value, Errc::MalformedAttribute);
    const std::uint16_t afi = r.u16();
    const std::uint8_t safi = r.u8();
    const auto family = afi_from_wire(afi);
    if (!family || safi != kSafiUnicast) {
        ++out.skipped;
        return;
    }
    auto prefixes = decode_nlri(r.take(r.remaining()), *family);
    out.mp_withdrawn.insert(out.mp_withdrawn.end(), prefixes.begin(), prefixes.end());
}

void write_prefix(ByteWriter& w, const IpPrefix& p)
{
    w.u8(static_cast<std::uint8_t>(p.length()));
    w.bytes(p.address().first((p.length() + 7) / 8));
}

void write_attr(ByteWriter& w, std::uint8_t flags, std::uint8_t code, ByteView value)
{
    if (value.size() > 255) {
        w.u8(flags | 0x10);
        w.u8(code);
        w.u16(static_cast<std::uint16_t>(value.size()));
    } else {
        w.u8(flags);
        w.u8(code);
        w.u8(static_cast<std::uint8_t>(value.size()));
    }
    w.bytes(value);
}

}  // namespace

std::vector<IpPrefix> decode_nlri(ByteView data, Afi afi)
{
    std::vector<IpPrefix> out;
    std::size_t pos = 0;
    std::array<std::uint8_t, 16> buf{};
    while (pos < data.size()) {
        const unsigned len = data[pos++];
        if (len > max_length(afi)) {
            throw Error(Errc::MalformedNlri, "prefix length " + std::to_string(len));
        }
        const std::size_t n = (len + 7) / 8;
        if (data.size() - pos < n) throw Error(Errc::MalformedNlri, "prefix overruns NLRI field");
        buf.fill(0);
        std::copy_n(data.begin() + pos, n, buf.begin());
        pos += n;
        out.push_back(IpPrefix::canonical(afi, std::span(buf.data(), address_size(afi)), len));
    }
    return out;
}

PathAttributes parse_path_attributes(ByteView data, const AttributeContext& ctx)
{
    PathAttributes out;
    std::size_t pos = 0;
    while (pos < data.size()) {
        if (data.size() - pos < 3) malformed(0, "truncated attribute header");
        const std::uint8_t flags = data[pos];
        const std::uint8_t code = data[pos + 1];
        std::size_t len;
        if (flags & 0x10) {
            if (data.size() - pos < 4) malformed(code, "truncated extended length");
            len = (std::size_t{data[pos + 2]} << 8) | data[pos + 3];
            pos += 4;
        } else {
            len = data[pos + 2];
            pos += 3;
        }
        if (data.size() - pos < len) malformed(code, "value overruns attribute block");
        const ByteView value = data.subspan(pos, len);
        pos += len;

        switch (code) {
        case attr::kOrigin:
            if (len != 1 || value[0] > 2) malformed(code, "bad ORIGIN");
            out.origin_attr = static_cast<OriginAttr>(value[0]);
            break;
        case attr::kAsPath:
            out.as_path = parse_as_path(value, ctx.asn_size);
            break;
        case attr::kNextHop:
            if (len != 4 && len != 16) malformed(code, "bad NEXT_HOP length");
            out.next_hop = Bytes(value.begin(), value.end());
            break;
        case attr::kMpReachNlri:
            parse_mp_reach(value, ctx, out);
            break;
        case attr::kMpUnreachNlri:
            parse_mp_unreach(value, out);
            break;
        default:
            ++out.skipped;
            break;
        }
    }
    return out;
}

BgpUpdate parse_update(ByteView bytes, unsigned asn_size)
{
    if (bytes.size() < kBgpHeaderSize) {
        throw Error(Errc::TruncatedMessage, "message shorter than the 19-octet header");
    }
    if (!std::all_of(bytes.begin(), bytes.begin() + 16, [](std::uint8_t b) { return b == 0xFF; })) {
        throw Error(Errc::BadMarker, "marker is not all ones");
    }
    const std::size_t length = (std::size_t{bytes[16]} << 8) | bytes[17];
    if (length < kBgpHeaderSize) throw Error(Errc::TruncatedMessage, "length field " + std::to_string(length));
    if (length > bytes.size()) {
        throw Error(Errc::TruncatedMessage, "length field " + std::to_string(length) + " exceeds " +
                                                std::to_string(bytes.size()) + " available octets");
    }
    if (bytes[18] != kBgpUpdate) throw Error(Errc::NotAnUpdate, "type " + std::to_string(bytes[18]));

    ByteReader r(bytes.subspan(kBgpHeaderSize, length - kBgpHeaderSize), Errc::TruncatedMessage);
    BgpUpdate update;
    const std::uint16_t withdrawn_len = r.u16();
    update.withdrawn = decode_nlri(r.take(withdrawn_len), Afi::IPv4);
    const std::uint16_t attr_len = r.u16();
    if (attr_len > r.remaining()) malformed(0, "attribute length exceeds message");
    auto attrs = parse_path_attributes(r.take(attr_len), AttributeContext{asn_size, false});
    update.nlri = decode_nlri(r.take(r.remaining()), Afi::IPv4);

    if (!update.nlri.empty()) {
        if (!attrs.as_path) malformed(attr::kAsPath, "missing mandatory AS_PATH");
        if (!attrs.next_hop) malformed(attr::kNextHop, "missing mandatory NEXT_HOP");
    }
    if (!attrs.mp_nlri.empty() && !attrs.as_path) malformed(attr::kAsPath, "missing mandatory AS_PATH");

    update.origin_attr = attrs.origin_attr;
    update.as_path = std::move(attrs.as_path);
    update.next_hop = std::move(attrs.next_hop);
    update.mp_next_hop = std::move(attrs.mp_next_hop);
    update.nlri.insert(update.nlri.end(), attrs.mp_nlri.begin(), attrs.mp_nlri.end());
    update.withdrawn.insert(update.withdrawn.end(), attrs.mp_withdrawn.begin(), attrs.mp_withdrawn.end());
    update.skipped_attributes = attrs.skipped;
    return update;
}

Bytes encode_update(const BgpUpdate& update, unsigned asn_size)
{
    ByteWriter w;
    for (int i = 0; i < 16; ++i) w.u8(0xFF);
    w.u16(0);  // patched below
    w.u8(kBgpUpdate);

    std::vector<IpPrefix> wd4, wd6, nlri4, nlri6;
    for (const auto& p : update.withdrawn) (p.afi() == Afi::IPv4 ? wd4 : wd6).push_back(p);
    for (const auto& p : update.nlri) (p.afi() == Afi::IPv4 ? nlri4 : nlri6).push_back(p);

    ByteWriter wd;
    for (const auto& p : wd4) write_prefix(wd, p);
    w.u16(static_cast<std::uint16_t>(wd.size()));
    w.bytes(wd.buffer());

    ByteWriter attrs;
    if (update.origin_attr) {
        const std::uint8_t v = static_cast<std::uint8_t>(*update.origin_attr);
        write_attr(attrs, 0x40, attr::kOrigin, ByteView(&v, 1));
    }
    if (update.as_path) {
        ByteWriter path;
        for (const auto& seg : update.as_path->segments) {
            path.u8(static_cast<std::uint8_t>(seg.type));
            path.u8(static_cast<std::uint8_t>(seg.asns.size()));
            for (auto a : seg.asns) {
                if (asn_size == 2) {
                    path.u16(static_cast<std::uint16_t>(a.value > 0xFFFF ? kAsTrans : a.value));
                } else {
                    path.u32(a.value);
                }
            }
        }
        write_attr(attrs, 0x40, attr::kAsPath, path.buffer());
    }
    if (update.next_hop) write_attr(attrs, 0x40, attr::kNextHop, *update.next_hop);
    if (!nlri6.empty()) {
        ByteWriter mp;
        mp.u16(kAfiIpv6);
        mp.u8(kSafiUnicast);
        Bytes nh = update.mp_next_hop.value_or(Bytes(16, 0));
        mp.u8(static_cast<std::uint8_t>(nh.size()));
        mp.bytes(nh);
        mp.u8(0);
        for (const auto& p : nlri6) write_prefix(mp, p);
        write_attr(attrs, 0x80, attr::kMpReachNlri, mp.buffer());
    }
    if (!wd6.empty()) {
        ByteWriter mp;
        mp.u16(kAfiIpv6);
        mp.u8(kSafiUnicast);
        for (const auto& p : wd6) write_prefix(mp, p);
        write_attr(attrs, 0x80, attr::kMpUnreachNlri, mp.buffer());
    }
    w.u16(static_cast<std::uint16_t>(attrs.size()));
    w.bytes(attrs.buffer());
    for (const auto& p : nlri4) write_prefix(w, p);

    if (w.size() > 0xFFFF) throw Error(Errc::MalformedAttribute, "encoded UPDATE exceeds 65535 octets");
    w.patch_u16(16, static_cast<std::uint16_t>(w.size()));
    return w.take();
}

}  // namespace bgpsecx
