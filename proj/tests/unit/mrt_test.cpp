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

#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <string>

#include "json.hpp"

#include "bgpsecx/error.hpp"
#include "bgpsecx/mrt.hpp"
#include "support.hpp"

using namespace bgpsecx;
using namespace bgpsecx::mrt;

namespace {

const std::string kPeerIndex = "c0000201" "0000" "0002" "02" "0a000001" "c0000205" "0000fdf2"
                               "02" "0a000002" "c0000206" "0000fdf3";
const std::string kRibIpv4 = "00000000" "18" "cb0071" "0001" "0000" "5f5e1000" "0018" "40010100"
                             "40020a02020000fdf20000fdfc" "400304c0000201";
const std::string kEndOfRib = std::string(32, 'f') + "0017" "02" "0000" "0000";
const std::string kSimple = std::string(32, 'f') + "002f" "02" "0000" "0014" "40010100"
                            "40020602010000fde9" "400304c0000201" "18c63364";

// BGP4MP_MESSAGE_AS4 header: peer AS, local AS, ifindex, AFI=1, peer/local IP.
const std::string kBgp4mpAs4Header = "0000fde9" "0000fdf2" "0000" "0001" "c0000209" "c0000201";

MrtRecord record(std::uint16_t type, std::uint16_t subtype, const std::string& payload_hex)
{
    return MrtRecord{1700000000, type, subtype, test::hex(payload_hex)};
}

struct Counts {
    std::uint64_t records = 0, announcements = 0, withdrawals = 0, malformed = 0;
    bool truncated = false;
};

Counts count_file(const std::filesystem::path& path)
{
    auto src = open_trace(path);
    AnnouncementStream stream(*src);
    std::vector<RouteAnnouncement> batch;
    while (stream.next(batch)) {
    }
    const auto& c = stream.counters();
    return {c.records, c.announcements, c.withdrawals, c.malformed_records, stream.truncated()};
}

nlohmann::json reference_counts()
{
    std::ifstream in(test::data_dir() / "traces" / "reference-counts.json");
    return nlohmann::json::parse(in);
}

}  // namespace

TEST(Mrt, EmptySourceYieldsNothing)
{
    MemorySource src(ByteView{});
    MrtReader reader(src);
    EXPECT_FALSE(reader.next());
}

TEST(Mrt, DeclaredLengthPastEndIsTruncated)
{
    Bytes framed = encode_record(record(kTableDumpV2, kPeerIndexTable, kPeerIndex));
    framed.pop_back();
    MemorySource src(framed);
    MrtReader reader(src);
    try {
        reader.next();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::TruncatedRecord);
    }
}

TEST(Mrt, HeaderFraming)
{
    const Bytes framed = encode_record(record(kTableDumpV2, kPeerIndexTable, kPeerIndex));
    EXPECT_EQ(to_hex(ByteView(framed).first(12)), "6553f100" "000d" "0001" "00000022");
    MemorySource src(framed);
    MrtReader reader(src);
    auto r = reader.next();
    ASSERT_TRUE(r);
    EXPECT_EQ(r->timestamp, 1700000000u);
    EXPECT_EQ(r->payload.size(), 34u);
    EXPECT_FALSE(reader.next());
}

TEST(Mrt, PeerIndexTable)
{
    PeerTable peers;
    IngestCounters counters;
    auto out = mrt_to_announcements(record(kTableDumpV2, kPeerIndexTable, kPeerIndex), peers, counters);
    EXPECT_TRUE(out.empty());
    ASSERT_EQ(peers.peers.size(), 2u);
    EXPECT_EQ(peers.peers[0].asn, Asn{65010});
    EXPECT_EQ(peers.peers[1].asn, Asn{65011});
    EXPECT_EQ(peers.peers[0].address, test::hex("c0000205"));
}

TEST(Mrt, RibIpv4Entry)
{
    PeerTable peers;
    IngestCounters counters;
    mrt_to_announcements(record(kTableDumpV2, kPeerIndexTable, kPeerIndex), peers, counters);
    auto out = mrt_to_announcements(record(kTableDumpV2, kRibIpv4Unicast, kRibIpv4), peers, counters);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].prefix.str(), "203.0.113.0/24");
    EXPECT_EQ(out[0].announcing_member, Asn{65010});
    EXPECT_EQ(out[0].origin(), Asn{65020});
    EXPECT_EQ(out[0].kind, RouteKind::Announce);
    EXPECT_EQ(out[0].next_hop, test::hex("c0000201"));
}

TEST(Mrt, RibEntryWithUnknownPeerIsMalformed)
{
    PeerTable peers;
    IngestCounters counters;
    try {
        mrt_to_announcements(record(kTableDumpV2, kRibIpv4Unicast, kRibIpv4), peers, counters);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MalformedPayload);
    }
}

TEST(Mrt, Bgp4mpEndOfRibYieldsNothing)
{
    PeerTable peers;
    IngestCounters counters;
    auto out = mrt_to_announcements(record(kBgp4mp, kMessageAs4, kBgp4mpAs4Header + kEndOfRib), peers, counters);
    EXPECT_TRUE(out.empty());
}

TEST(Mrt, Bgp4mpMessageAs4)
{
    PeerTable peers;
    IngestCounters counters;
    auto out = mrt_to_announcements(record(kBgp4mp, kMessageAs4, kBgp4mpAs4Header + kSimple), peers, counters);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].announcing_member, Asn{65001});
    EXPECT_EQ(out[0].prefix.str(), "198.51.100.0/24");
    EXPECT_EQ(out[0].timestamp, 1700000000);
}

TEST(Mrt, Bgp4mpEtCarriesMicroseconds)
{
    PeerTable peers;
    IngestCounters counters;
    auto out = mrt_to_announcements(record(kBgp4mpEt, kMessageAs4, "000f4240" + kBgp4mpAs4Header + kSimple),
                                    peers, counters);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].prefix.str(), "198.51.100.0/24");
}

TEST(Mrt, UnknownSubtypeIsCounted)
{
    PeerTable peers;
    IngestCounters counters;
    auto out = mrt_to_announcements(record(kTableDumpV2, 3, kRibIpv4), peers, counters);
    EXPECT_TRUE(out.empty());
    EXPECT_EQ(counters.skipped_records, 1u);
    out = mrt_to_announcements(record(99, 0, "00"), peers, counters);
    EXPECT_EQ(counters.skipped_records, 2u);
}

TEST(Mrt, StreamCountsMalformedAndContinues)
{
    Bytes data = encode_record(record(kTableDumpV2, kPeerIndexTable, kPeerIndex));
    const Bytes bad = encode_record(record(kTableDumpV2, kRibIpv4Unicast, "00000000" "18cb"));
    const Bytes good = encode_record(record(kTableDumpV2, kRibIpv4Unicast, kRibIpv4));
    data.insert(data.end(), bad.begin(), bad.end());
    data.insert(data.end(), good.begin(), good.end());
    MemorySource src(data);
    AnnouncementStream stream(src);
    std::vector<RouteAnnouncement> batch;
    std::size_t n = 0;
    while (stream.next(batch)) n += batch.size();
    EXPECT_EQ(n, 1u);
    EXPECT_EQ(stream.counters().records, 3u);
    EXPECT_EQ(stream.counters().malformed_records, 1u);
    EXPECT_FALSE(stream.truncated());
}

TEST(Mrt, StreamReportsTruncation)
{
    Bytes data = encode_record(record(kTableDumpV2, kPeerIndexTable, kPeerIndex));
    const Bytes good = encode_record(record(kTableDumpV2, kRibIpv4Unicast, kRibIpv4));
    data.insert(data.end(), good.begin(), good.end() - 5);
    MemorySource src(data);
    AnnouncementStream stream(src);
    std::vector<RouteAnnouncement> batch;
    while (stream.next(batch)) {
    }
    EXPECT_TRUE(stream.truncated());
    EXPECT_EQ(stream.counters().records, 1u);
}

TEST(MrtParity, MatchesReferenceDecoderCounts)
{
    const auto ref = reference_counts();
    ASSERT_EQ(ref.size(), 4u);
    for (const auto& [name, expect] : ref.items()) {
        const Counts got = count_file(test::data_dir() / "traces" / name);
        EXPECT_EQ(got.records, expect["records"].get<std::uint64_t>()) << name;
        EXPECT_EQ(got.announcements, expect["announcements"].get<std::uint64_t>()) << name;
        EXPECT_EQ(got.withdrawals, expect["withdrawals"].get<std::uint64_t>()) << name;
        EXPECT_EQ(got.malformed, 0u) << name;
        EXPECT_FALSE(got.truncated) << name;
    }
}

TEST(MrtParity, RereadingIsStable)
{
    const auto path = test::data_dir() / "traces" / "collector-sample.mrt";
    const Counts a = count_file(path);
    const Counts b = count_file(path);
    EXPECT_EQ(a.announcements, b.announcements);
    EXPECT_EQ(a.withdrawals, b.withdrawals);
}

TEST(MrtParity, GzipMatchesPlain)
{
    auto collect = [](const std::filesystem::path& p) {
        auto src = open_trace(p);
        AnnouncementStream stream(*src);
        std::vector<RouteAnnouncement> all, batch;
        while (stream.next(batch)) all.insert(all.end(), batch.begin(), batch.end());
        return all;
    };
    const auto dir = test::data_dir() / "traces";
    EXPECT_EQ(collect(dir / "collector-sample.mrt"), collect(dir / "collector-sample.mrt.gz"));
}

TEST(Mrt, MissingFileIsIoError)
{
    try {
        open_trace(test::data_dir() / "traces" / "no-such.mrt");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::Io);
    }
}
