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

#include "bgpsecx/federation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "bgpsecx/error.hpp"

namespace bgpsecx {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& why)
{
    throw Error(Errc::MalformedPayload, why);
}

json parse_payload(std::string_view payload)
{
    try {
        return json::parse(payload);
    } catch (const json::exception& e) {
        malformed(e.what());
    }
}

IpPrefix prefix_field(const json& j, const char* name)
{
    if (!j.contains(name) || !j[name].is_string()) malformed(std::string("missing prefix field ") + name);
    auto p = IpPrefix::try_parse(j[name].get<std::string>());
    if (!p) malformed("bad prefix " + j[name].get<std::string>());
    return *p;
}

std::int64_t int_field(const json& j, const char* name)
{
    if (!j.contains(name) || !j[name].is_number_integer()) malformed(std::string("missing integer ") + name);
    return j[name].get<std::int64_t>();
}

Asn asn_value(const json& j)
{
    if (!j.is_number_unsigned() || j.get<std::uint64_t>() > 0xFFFFFFFFull) malformed("bad ASN");
    return Asn{j.get<std::uint32_t>()};
}

}  // namespace

Key parse_key(std::string_view hex)
{
    if (hex.size() != 64) throw Error(Errc::SchemaError, "key must be 64 hex digits");
    Bytes raw = from_hex(hex);
    Key key{};
    std::copy(raw.begin(), raw.end(), key.begin());
    return key;
}

std::string_view to_string(MsgType t) noexcept
{
    switch (t) {
    case MsgType::Query: return "Query";
    case MsgType::Response: return "Response";
    case MsgType::ObservationPush: return "ObservationPush";
    case MsgType::WhitelistDigest: return "WhitelistDigest";
    case MsgType::WhitelistSync: return "WhitelistSync";
    }
    return "Unknown";
}

Bytes encode_message(const FederationMessage& msg, const Key& key)
{
    if (msg.payload.size() > kMaxPayload) {
        throw Error(Errc::PayloadTooLarge, std::to_string(msg.payload.size()) + " octets");
    }
    const std::string& sender = msg.sender.str();
    const std::size_t total = kMinFrame + sender.size() + msg.payload.size();

    ByteWriter w;
    w.buffer().reserve(total);
    w.u32(static_cast<std::uint32_t>(total));
    w.u8(msg.version);
    w.u8(static_cast<std::uint8_t>(msg.type));
    w.u8(static_cast<std::uint8_t>(sender.size()));
    w.bytes(std::string_view(sender));
    w.u64(msg.sequence);
    w.u24(static_cast<std::uint32_t>(msg.payload.size()));
    w.bytes(std::string_view(msg.payload));
    const Digest tag = hmac_sha256(key, w.buffer());
    w.bytes(ByteView(tag));
    return w.take();
}

void SessionState::accept(const IxpId& sender, std::uint64_t sequence)
{
    auto it = last_.find(sender);
    if (it != last_.end() && sequence <= it->second) {
        throw Error(Errc::ReplayDetected, sender.str() + " sequence " + std::to_string(sequence) +
                                              " <= " + std::to_string(it->second));
    }
    last_[sender] = sequence;
}

std::optional<std::uint64_t> SessionState::last(const IxpId& sender) const
{
    auto it = last_.find(sender);
    if (it == last_.end()) return std::nullopt;
    return it->second;
}

FederationMessage decode_message(ByteView frame, const Key& key, SessionState* session)
{
    if (frame.size() < kMinFrame) {
        throw Error(Errc::Truncated, std::to_string(frame.size()) + " octets is below the minimum frame");
    }
    const ByteView body = frame.first(frame.size() - kTagSize);
    const Digest expected = hmac_sha256(key, body);
    if (!digest_equal(expected, frame.last(kTagSize))) throw Error(Errc::AuthFailure, "tag mismatch");

    ByteReader r(body, Errc::Truncated);
    const std::uint32_t total = r.u32();
    if (total != frame.size()) {
        throw Error(Errc::Truncated, "declared " + std::to_string(total) + " octets, have " +
                                         std::to_string(frame.size()));
    }
    FederationMessage msg;
    msg.version = r.u8();
    if (msg.version != kProtocolVersion) throw Error(Errc::BadVersion, std::to_string(msg.version));
    const std::uint8_t type = r.u8();
    if (type < 1 || type > 5) malformed("message type " + std::to_string(type));
    msg.type = static_cast<MsgType>(type);
    const std::uint8_t sender_len = r.u8();
    const ByteView sender = r.take(sender_len);
    const std::string sender_text(sender.begin(), sender.end());
    if (!IxpId::is_valid(sender_text)) malformed("bad sender id");
    msg.sender = IxpId::make(sender_text);
    msg.sequence = r.u64();
    const std::uint32_t payload_len = r.u24();
    const ByteView payload = r.take(payload_len);
    if (!r.empty()) throw Error(Errc::Truncated, "trailing octets before tag");
    msg.payload.assign(payload.begin(), payload.end());
    if (session != nullptr) session->accept(msg.sender, msg.sequence);
    return msg;
}

std::optional<std::uint32_t> peek_frame_length(ByteView prefix) noexcept
{
    if (prefix.size() < 4) return std::nullopt;
    return (std::uint32_t{prefix[0]} << 24) | (std::uint32_t{prefix[1]} << 16) |
           (std::uint32_t{prefix[2]} << 8) | prefix[3];
}

std::optional<std::string> peek_sender(ByteView frame) noexcept
{
    if (frame.size() < 7) return std::nullopt;
    const std::size_t len = frame[6];
    if (frame.size() < 7 + len) return std::nullopt;
    return std::string(frame.begin() + 7, frame.begin() + 7 + static_cast<std::ptrdiff_t>(len));
}

std::string encode_query(const IpPrefix& prefix)
{
    json j;
    j["prefix"] = prefix.str();
    return j.dump();
}

IpPrefix decode_query(std::string_view payload)
{
    const json j = parse_payload(payload);
    if (!j.is_object()) malformed("query must be an object");
    return prefix_field(j, "prefix");
}

std::string encode_claims(const std::vector<ObservationClaim>& claims)
{
    json arr = json::array();
    for (const auto& c : claims) {
        json o;
        o["prefix"] = c.prefix.str();
        json origins = json::array();
        for (Asn a : c.origins_seen) origins.push_back(a.value);
        o["origins"] = std::move(origins);
        o["first_seen"] = c.first_seen;
        o["last_seen"] = c.last_seen;
        o["claimant"] = c.claimant.str();
        arr.push_back(std::move(o));
    }
    json j;
    j["claims"] = std::move(arr);
    return j.dump();
}

std::vector<ObservationClaim> decode_claims(std::string_view payload)
{
    const json j = parse_payload(payload);
    if (!j.is_object() || !j.contains("claims") || !j["claims"].is_array()) malformed("claims array required");
    std::vector<ObservationClaim> out;
    for (const auto& o : j["claims"]) {
        if (!o.is_object()) malformed("claim must be an object");
        ObservationClaim c;
        c.prefix = prefix_field(o, "prefix");
        if (!o.contains("origins") || !o["origins"].is_array() || o["origins"].empty()) {
            malformed("claim needs a non-empty origins array");
        }
        for (const auto& a : o["origins"]) c.origins_seen.insert(asn_value(a));
        c.first_seen = int_field(o, "first_seen");
        c.last_seen = int_field(o, "last_seen");
        if (c.first_seen > c.last_seen) malformed("first_seen after last_seen");
        if (!o.contains("claimant") || !o["claimant"].is_string() ||
            !IxpId::is_valid(o["claimant"].get<std::string>())) {
            malformed("bad claimant");
        }
        c.claimant = IxpId::make(o["claimant"].get<std::string>());
        out.push_back(std::move(c));
    }
    return out;
}

std::string encode_observations(const std::vector<RouteAnnouncement>& anns)
{
    json arr = json::array();
    for (const auto& a : anns) {
        json o;
        o["prefix"] = a.prefix.str();
        json segs = json::array();
        for (const auto& seg : a.as_path.segments) {
            json asns = json::array();
            for (Asn x : seg.asns) asns.push_back(x.value);
            segs.push_back(json::array({seg.type == SegmentType::Set ? "set" : "seq", std::move(asns)}));
        }
        o["path"] = std::move(segs);
        o["member"] = a.announcing_member.value;
        o["next_hop"] = to_hex(a.next_hop);
        o["time"] = a.timestamp;
        o["kind"] = a.kind == RouteKind::Announce ? "announce" : "withdraw";
        arr.push_back(std::move(o));
    }
    json j;
    j["observations"] = std::move(arr);
    return j.dump();
}

std::vector<RouteAnnouncement> decode_observations(std::string_view payload)
{
    const json j = parse_payload(payload);
    if (!j.is_object() || !j.contains("observations") || !j["observations"].is_array()) {
        malformed("observations array required");
    }
    std::vector<RouteAnnouncement> out;
    for (const auto& o : j["observations"]) {
        if (!o.is_object()) malformed("observation must be an object");
        RouteAnnouncement a;
        a.prefix = prefix_field(o, "prefix");
        if (!o.contains("path") || !o["path"].is_array()) malformed("path array required");
        for (const auto& s : o["path"]) {
            if (!s.is_array() || s.size() != 2 || !s[0].is_string() || !s[1].is_array()) malformed("bad segment");
            PathSegment seg;
            const std::string type = s[0].get<std::string>();
            if (type == "set") {
                seg.type = SegmentType::Set;
            } else if (type == "seq") {
                seg.type = SegmentType::Sequence;
            } else {
                malformed("segment type " + type);
            }
            for (const auto& x : s[1]) seg.asns.push_back(asn_value(x));
            a.as_path.segments.push_back(std::move(seg));
        }
        if (!o.contains("member")) malformed("member required");
        a.announcing_member = asn_value(o["member"]);
        if (o.contains("next_hop")) {
            if (!o["next_hop"].is_string()) malformed("next_hop must be hex");
            try {
                a.next_hop = from_hex(o["next_hop"].get<std::string>());
            } catch (const Error&) {
                malformed("next_hop must be hex");
            }
        }
        a.timestamp = int_field(o, "time");
        const std::string kind = o.value("kind", std::string("announce"));
        if (kind == "announce") {
            a.kind = RouteKind::Announce;
        } else if (kind == "withdraw") {
            a.kind = RouteKind::Withdraw;
        } else {
            malformed("kind " + kind);
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::string encode_digest(const Digest& digest)
{
    json j;
    j["digest"] = to_hex(digest);
    return j.dump();
}

Digest decode_digest(std::string_view payload)
{
    const json j = parse_payload(payload);
    if (!j.is_object() || !j.contains("digest") || !j["digest"].is_string()) malformed("digest required");
    const std::string hex = j["digest"].get<std::string>();
    if (hex.size() != 64) malformed("digest must be 64 hex digits");
    Bytes raw;
    try {
        raw = from_hex(hex);
    } catch (const Error&) {
        malformed("digest must be hex");
    }
    Digest d{};
    std::copy(raw.begin(), raw.end(), d.begin());
    return d;
}

std::vector<ObservationClaim> handle_query(const ObservationHistory& history, const IpPrefix& prefix,
                                           const IxpId& local)
{
    std::vector<ObservationClaim> claims;
    history.for_each_covering(prefix, [&](const IpPrefix& stored, const PrefixRecord& rec) {
        if (rec.origins.empty()) return;
        ObservationClaim c;
        c.prefix = stored;
        c.claimant = local;
        c.first_seen = rec.origins.begin()->second.first_seen;
        c.last_seen = rec.origins.begin()->second.last_seen;
        for (const auto& [asn, o] : rec.origins) {
            c.origins_seen.insert(asn);
            c.first_seen = std::min(c.first_seen, o.first_seen);
            c.last_seen = std::max(c.last_seen, o.last_seen);
        }
        claims.push_back(std::move(c));
    });
    return claims;
}

std::string_view to_string(CrossState s) noexcept
{
    switch (s) {
    case CrossState::Corroborated: return "Corroborated";
    case CrossState::Disputed: return "Disputed";
    case CrossState::Unknown: return "Unknown";
    }
    return "Unknown";
}

CrossValidation cross_validate(const RouteAnnouncement& ann, const std::vector<ObservationClaim>& claims,
                               const QuorumPolicy& policy)
{
    const OriginResult origin = ann.origin();
    std::map<IxpId, bool> agrees;
    for (const auto& c : claims) {
        if (!covers(c.prefix, ann.prefix)) continue;
        bool& a = agrees[c.claimant];
        if (origin && c.origins_seen.contains(*origin)) a = true;
    }
    CrossValidation cv;
    cv.responders = agrees.size();
    cv.agreeing = static_cast<std::size_t>(std::count_if(agrees.begin(), agrees.end(), [](const auto& kv) { return kv.second; }));
    if (cv.responders < policy.min_responders) {
        cv.state = CrossState::Unknown;
    } else if (std::uint64_t{cv.agreeing} * policy.quorum_denominator >=
               std::uint64_t{policy.quorum_numerator} * cv.responders) {
        cv.state = CrossState::Corroborated;
    } else {
        cv.state = CrossState::Disputed;
    }
    return cv;
}

Digest whitelist_digest(const Whitelist& wl)
{
    // "<asn>:<prefix>,<prefix>;<bound or ->\n" per member, ascending ASN,
    // prefixes sorted as text.
    std::string canon;
    for (const auto& [asn, entry] : wl.entries) {
        std::vector<std::string> prefixes;
        prefixes.reserve(entry.allowed.size());
        for (const auto& p : entry.allowed) prefixes.push_back(p.str());
        std::sort(prefixes.begin(), prefixes.end());
        canon += to_string(asn);
        canon += ':';
        for (std::size_t i = 0; i < prefixes.size(); ++i) {
            if (i) canon += ',';
            canon += prefixes[i];
        }
        canon += ';';
        canon += entry.allow_more_specifics_up_to ? std::to_string(*entry.allow_more_specifics_up_to) : "-";
        canon += '\n';
    }
    return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(canon.data()), canon.size()));
}

const PeerConfig* FederationConfig::find(const IxpId& id) const
{
    for (const auto& p : peers) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

FederationConfig load_federation_config(std::string_view document)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::exception& e) {
        throw Error(Errc::SchemaError, std::string("/: ") + e.what());
    }
    auto need_string = [](const json& j, const char* name, const std::string& path) {
        if (!j.is_object() || !j.contains(name) || !j[name].is_string()) {
            throw Error(Errc::SchemaError, path + "/" + name + ": required string");
        }
        return j[name].get<std::string>();
    };
    FederationConfig cfg;
    cfg.self = IxpId::make(need_string(doc, "self", ""));
    cfg.listen = doc.value("listen", std::string());
    if (!doc.contains("peers") || !doc["peers"].is_array()) throw Error(Errc::SchemaError, "/peers: required array");
    std::set<IxpId> seen{cfg.self};
    for (std::size_t i = 0; i < doc["peers"].size(); ++i) {
        const std::string base = "/peers/" + std::to_string(i);
        const json& p = doc["peers"][i];
        PeerConfig peer;
        peer.id = IxpId::make(need_string(p, "id", base));
        if (!seen.insert(peer.id).second) throw Error(Errc::SchemaError, base + "/id: duplicate " + peer.id.str());
        peer.address = need_string(p, "address", base);
        peer.key = parse_key(need_string(p, "key", base));
        cfg.peers.push_back(std::move(peer));
    }
    return cfg;
}

FederationConfig load_federation_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_federation_config(buf.str());
}

}  // namespace bgpsecx
