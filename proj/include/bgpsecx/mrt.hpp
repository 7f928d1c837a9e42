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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <vector>

#include "bgpsecx/bytes.hpp"
#include "bgpsecx/model.hpp"

namespace bgpsecx::mrt {

inline constexpr std::size_t kHeaderSize = 12;

inline constexpr std::uint16_t kTableDumpV2 = 13;
inline constexpr std::uint16_t kBgp4mp = 16;
inline constexpr std::uint16_t kBgp4mpEt = 17;

// TABLE_DUMP_V2 subtypes
inline constexpr std::uint16_t kPeerIndexTable = 1;
inline constexpr std::uint16_t kRibIpv4Unicast = 2;
inline constexpr std::uint16_t kRibIpv6Unicast = 4;

// BGP4MP subtypes
inline constexpr std::uint16_t kStateChange = 0;
inline constexpr std::uint16_t kMessage = 1;
inline constexpr std::uint16_t kMessageAs4 = 4;
inline constexpr std::uint16_t kStateChangeAs4 = 5;

struct MrtRecord {
    std::uint32_t timestamp = 0;
    std::uint16_t type = 0;
    std::uint16_t subtype = 0;
    /// Exactly the declared length; for BGP4MP_ET this still starts with the
    /// 4-octet microsecond field.
    Bytes payload;
};

/// Pull-style octet source.
class ByteSource {
public:
    virtual ~ByteSource() = default;
    /// Reads up to out.size() octets; returns 0 only at end of input.
    virtual std::size_t read(std::span<std::uint8_t> out) = 0;
};

class MemorySource : public ByteSource {
public:
    explicit MemorySource(ByteView data) : data_(data) {}
    std::size_t read(std::span<std::uint8_t> out) override;

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

class StreamSource : public ByteSource {
public:
    explicit StreamSource(std::istream& in) : in_(in) {}
    std::size_t read(std::span<std::uint8_t> out) override;

private:
    std::istream& in_;
};

/// Opens a trace file; names ending in ".gz" are inflated on the fly.
/// Throws Error(Io) when the file cannot be opened.
std::unique_ptr<ByteSource> open_trace(const std::filesystem::path& path);

/// Splits a byte source into MRT records (RFC 6396 common header framing).
class MrtReader {
public:
    explicit MrtReader(ByteSource& source) : source_(source) {}

    /// Next record in file order, std::nullopt at a clean end of input.
    /// Throws Error(TruncatedRecord) when input ends inside a record.
    std::optional<MrtRecord> next();

    std::uint64_t bytes_consumed() const noexcept { return consumed_; }

private:
    std::size_t read_fully(std::span<std::uint8_t> out);

    ByteSource& source_;
    std::uint64_t consumed_ = 0;
};

struct PeerEntry {
    Asn asn;
    std::uint32_t bgp_id = 0;
    Bytes address;
};

/// Peer index from the latest PEER_INDEX_TABLE; RIB entries refer into it.
struct PeerTable {
    std::vector<PeerEntry> peers;
};

struct IngestCounters {
    std::uint64_t records = 0;
    std::uint64_t announcements = 0;
    std::uint64_t withdrawals = 0;
    /// Unknown MRT types/subtypes and BGP4MP records that are not UPDATEs.
    std::uint64_t skipped_records = 0;
    std::uint64_t malformed_records = 0;
    std::uint64_t skipped_attributes = 0;
};

/// Converts one record into announcements and withdrawals.
///
/// PEER_INDEX_TABLE replaces `peers` and yields nothing. RIB_IPV4/6_UNICAST
/// yields one Announce per RIB entry, attributed to the entry's peer ASN.
/// BGP4MP / BGP4MP_ET MESSAGE and MESSAGE_AS4 yield the wrapped UPDATE's
/// withdrawals followed by its announcements. Anything else bumps
/// `counters.skipped_records` and yields nothing.
///
/// Throws Error(MalformedPayload | MalformedAttribute | MalformedNlri |
/// TruncatedMessage | BadMarker) for damaged payloads; the counters are left
/// for the caller to update in that case.
std::vector<RouteAnnouncement> mrt_to_announcements(const MrtRecord& record, PeerTable& peers,
                                                    IngestCounters& counters);

/// Reader + peer table + counters: the whole trace-to-announcement path
/// used by replay. Malformed records are counted and skipped; truncation
/// ends the stream and is reported through truncated().
class AnnouncementStream {
public:
    explicit AnnouncementStream(ByteSource& source) : reader_(source) {}

    /// Replaces `out` with the next non-empty batch; false at end of input.
    bool next(std::vector<RouteAnnouncement>& out);

    const IngestCounters& counters() const noexcept { return counters_; }
    const PeerTable& peers() const noexcept { return peers_; }
    bool truncated() const noexcept { return truncated_; }

private:
    MrtReader reader_;
    PeerTable peers_;
    IngestCounters counters_;
    bool truncated_ = false;
};

/// Frames a payload with the MRT common header.
Bytes encode_record(const MrtRecord& record);

}  // namespace bgpsecx::mrt
