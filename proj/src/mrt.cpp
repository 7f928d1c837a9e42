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

#include "bgpsecx/mrt.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>

#include "bgpsecx/bgp_update.hpp"
#include "bgpsecx/error.hpp"

namespace bgpsecx::mrt {

namespace {

class FileSource : public ByteSource {
public:
    explicit FileSource(const std::filesystem::path& path) : in_(path, std::ios::binary)
    {
        if (!in_) throw Error(Errc::Io, "cannot open " + path.string());
    }

    std::size_t read(std::span<std::uint8_t> out) override
    {
        in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
        return static_cast<std::size_t>(in_.gcount());
    }

private:
    std::ifstream in_;
};

class GzipSource : public ByteSource {
public:
    explicit GzipSource(const std::filesystem::path& path) : file_(gzopen(path.c_str(), "rb"))
    {
        if (file_ == nullptr) throw Error(Errc::Io, "cannot open " + path.string());
        gzbuffer(file_, 1 << 16);
    }
    ~GzipSource() override { gzclose(file_); }
    GzipSource(const GzipSource&) = delete;
    GzipSource& operator=(const GzipSource&) = delete;

    std::size_t read(std::span<std::uint8_t> out) override
    {
        const int n = gzread(file_, out.data(), static_cast<unsigned>(out.size()));
        if (n < 0) {
            int err = 0;
            throw Error(Errc::Io, std::string("gzip: ") + gzerror(file_, &err));
        }
        return static_cast<std::size_t>(n);
    }

private:
    gzFile file_;
};

PeerTable parse_peer_index(ByteView payload)
{
    ByteReader r(payload, Errc::MalformedPayload);
    r.u32();  // collector BGP id
    r.skip(r.u16());  // view name
    const std::uint16_t count = r.u16();
    PeerTable table;
    table.peers.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        const std::uint8_t type = r.u8();
        PeerEntry peer;
        peer.bgp_id = r.u32();
        const ByteView addr = r.take((type & 0x01) ? 16 : 4);
        peer.address.assign(addr.begin(), addr.end());
        peer.asn = Asn{(type & 0x02) ? r.u32() : r.u16()};
        table.peers.push_back(std::move(peer));
    }
    return table;
}

std::vector<RouteAnnouncement> parse_rib(ByteView payload, Afi afi, const PeerTable& peers,
                                         IngestCounters& counters)
{
    ByteReader r(payload, Errc::MalformedPayload);
    r.u32();  // sequence number
    const unsigned plen = r.u8();
    if (plen > max_length(afi)) throw Error(Errc::MalformedNlri, "RIB prefix length " + std::to_string(plen));
    std::array<std::uint8_t, 16> buf{};
    const ByteView bits = r.take((plen + 7) / 8);
    std::copy(bits.begin(), bits.end(), buf.begin());
    const IpPrefix prefix = IpPrefix::canonical(afi, std::span(buf.data(), address_size(afi)), plen);

    const std::uint16_t entries = r.u16();
    std::vector<RouteAnnouncement> out;
    out.reserve(entries);
    for (std::uint16_t i = 0; i < entries; ++i) {
        const std::uint16_t peer_index = r.u16();
        const std::uint32_t originated = r.u32();
        const ByteView attr_block = r.take(r.u16());
        if (peer_index >= peers.peers.size()) {
            throw Error(Errc::MalformedPayload, "peer index " + std::to_string(peer_index) +
                                                    " outside peer table of " +
                                                    std::to_string(peers.peers.size()));
        }
        auto attrs = parse_path_attributes(attr_block, AttributeContext{4, true});
        counters.skipped_attributes += attrs.skipped;
        RouteAnnouncement ann;
        ann.prefix = prefix;
        ann.as_path = attrs.as_path.value_or(AsPath{});
        ann.announcing_member = peers.peers[peer_index].asn;
        if (afi == Afi::IPv4 && attrs.next_hop) {
            ann.next_hop = std::move(*attrs.next_hop);
        } else if (attrs.mp_next_hop) {
            ann.next_hop = std::move(*attrs.mp_next_hop);
        } else if (attrs.next_hop) {
            ann.next_hop = std::move(*attrs.next_hop);
        }
        ann.timestamp = originated;
        ann.kind = RouteKind::Announce;
        out.push_back(std::move(ann));
    }
    counters.announcements += out.size();
    return out;
}

std::vector<RouteAnnouncement> parse_bgp4mp(const MrtRecord& record, IngestCounters& counters)
{
    ByteView payload = record.payload;
    if (record.type == kBgp4mpEt) {
        if (payload.size() < 4) throw Error(Errc::MalformedPayload, "BGP4MP_ET without microseconds");
        payload = payload.subspan(4);
    }
    if (record.subtype != kMessage && record.subtype != kMessageAs4) {
        ++counters.skipped_records;
        return {};
    }
    const unsigned asn_size = record.subtype == kMessageAs4 ? 4 : 2;
    ByteReader r(payload, Errc::MalformedPayload);
    const Asn peer_as{asn_size == 4 ? r.u32() : r.u16()};
    r.skip(asn_size);  // local AS
    r.u16();  // interface index
    const std::uint16_t afi = r.u16();
    if (afi != 1 && afi != 2) throw Error(Errc::MalformedPayload, "BGP4MP address family " + std::to_string(afi));
    const std::size_t addr_size = afi == 1 ? 4 : 16;
    r.skip(addr_size * 2);  // peer and local address
    const ByteView message = r.take(r.remaining());
    if (message.size() >= kBgpHeaderSize && message[18] != kBgpUpdate) {
        ++counters.skipped_records;  // OPEN, KEEPALIVE, NOTIFICATION, ...
        return {};
    }

    const BgpUpdate update = parse_update(message, asn_size);
    counters.skipped_attributes += update.skipped_attributes;
    std::vector<RouteAnnouncement> out;
    out.reserve(update.withdrawn.size() + update.nlri.size());
    for (const auto& p : update.withdrawn) {
        RouteAnnouncement w;
        w.prefix = p;
        w.announcing_member = peer_as;
        w.timestamp = record.timestamp;
        w.kind = RouteKind::Withdraw;
        out.push_back(std::move(w));
    }
    for (const auto& p : update.nlri) {
        RouteAnnouncement a;
        a.prefix = p;
        a.as_path = update.as_path.value_or(AsPath{});
        a.announcing_member = peer_as;
        const auto& nh = p.afi() == Afi::IPv4 ? update.next_hop : update.mp_next_hop;
        if (nh) a.next_hop = *nh;
        a.timestamp = record.timestamp;
        a.kind = RouteKind::Announce;
        out.push_back(std::move(a));
    }
    counters.withdrawals += update.withdrawn.size();
    counters.announcements += update.nlri.size();
    return out;
}

}  // namespace

std::size_t MemorySource::read(std::span<std::uint8_t> out)
{
    const std::size_t n = std::min(out.size(), data_.size() - pos_);
    std::memcpy(out.data(), data_.data() + pos_, n);
    pos_ += n;
    return n;
}

std::size_t StreamSource::read(std::span<std::uint8_t> out)
{
    in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
    return static_cast<std::size_t>(in_.gcount());
}

std::unique_ptr<ByteSource> open_trace(const std::filesystem::path& path)
{
    if (!std::filesystem::is_regular_file(path)) throw Error(Errc::Io, "cannot open " + path.string());
    if (path.extension() == ".gz") return std::make_unique<GzipSource>(path);
    return std::make_unique<FileSource>(path);
}

std::size_t MrtReader::read_fully(std::span<std::uint8_t> out)
{
    std::size_t got = 0;
    while (got < out.size()) {
        const std::size_t n = source_.read(out.subspan(got));
        if (n == 0) break;
        got += n;
    }
    consumed_ += got;
    return got;
}

std::optional<MrtRecord> MrtReader::next()
{
    std::array<std::uint8_t, kHeaderSize> header{};
    const std::size_t got = read_fully(header);
    if (got == 0) return std::nullopt;
    if (got < kHeaderSize) {
        throw Error(Errc::TruncatedRecord, "input ends inside a record header at offset " +
                                               std::to_string(consumed_ - got));
    }
    ByteReader r(header, Errc::TruncatedRecord);
    MrtRecord rec;
    rec.timestamp = r.u32();
    rec.type = r.u16();
    rec.subtype = r.u16();
    const std::uint32_t length = r.u32();
    // Grow in bounded steps so a corrupt length cannot force a huge allocation.
    constexpr std::size_t kChunk = 1 << 20;
    std::size_t filled = 0;
    while (filled < length) {
        const std::size_t step = std::min<std::size_t>(kChunk, length - filled);
        rec.payload.resize(filled + step);
        const std::size_t n = read_fully(std::span(rec.payload).subspan(filled, step));
        filled += n;
        if (n < step) {
            throw Error(Errc::TruncatedRecord, "declared length " + std::to_string(length) + ", only " +
                                                   std::to_string(filled) + " octets remain");
        }
    }
    return rec;
}

std::vector<RouteAnnouncement> mrt_to_announcements(const MrtRecord& record, PeerTable& peers,
                                                    IngestCounters& counters)
{
    IngestCounters delta;
    std::vector<RouteAnnouncement> out;
    if (record.type == kTableDumpV2) {
        switch (record.subtype) {
        case kPeerIndexTable:
            peers = parse_peer_index(record.payload);
            break;
        case kRibIpv4Unicast:
            out = parse_rib(record.payload, Afi::IPv4, peers, delta);
            break;
        case kRibIpv6Unicast:
            out = parse_rib(record.payload, Afi::IPv6, peers, delta);
            break;
        default:
            ++delta.skipped_records;
            break;
        }
    } else if (record.type == kBgp4mp || record.type == kBgp4mpEt) {
        out = parse_bgp4mp(record, delta);
    } else {
        ++delta.skipped_records;
    }
    counters.announcements += delta.announcements;
    counters.withdrawals += delta.withdrawals;
    counters.skipped_records += delta.skipped_records;
    counters.skipped_attributes += delta.skipped_attributes;
    return out;
}

bool AnnouncementStream::next(std::vector<RouteAnnouncement>& out)
{
    for (;;) {
        std::optional<MrtRecord> rec;
        try {
            rec = reader_.next();
        } catch (const Error& e) {
            if (e.code() != Errc::TruncatedRecord) throw;
            truncated_ = true;
            return false;
        }
        if (!rec) return false;
        ++counters_.records;
        try {
            out = mrt_to_announcements(*rec, peers_, counters_);
        } catch (const Error&) {
            ++counters_.malformed_records;
            continue;
        }
        if (!out.empty()) return true;
    }
}

Bytes encode_record(const MrtRecord& record)
{
    ByteWriter w;
    w.u32(record.timestamp);
    w.u16(record.type);
    w.u16(record.subtype);
    w.u32(static_cast<std::uint32_t>(record.payload.size()));
    w.bytes(record.payload);
    return w.take();
}

}  // namespace bgpsecx::mrt
