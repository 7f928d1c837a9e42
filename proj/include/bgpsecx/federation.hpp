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

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bgpsecx/anomaly.hpp"
#include "bgpsecx/bytes.hpp"
#include "bgpsecx/crypto.hpp"
#include "bgpsecx/model.hpp"
#include "bgpsecx/prefix.hpp"
#include "bgpsecx/whitelist.hpp"

namespace bgpsecx {

// ---------------------------------------------------------------------------
// Wire codec

using Key = std::array<std::uint8_t, 32>;

/// Parses 64 hex digits. Throws Error(SchemaError).
Key parse_key(std::string_view hex);

enum class MsgType : std::uint8_t {
    Query = 1,
    Response = 2,
    ObservationPush = 3,
    WhitelistDigest = 4,
    WhitelistSync = 5,
};

std::string_view to_string(MsgType t) noexcept;

inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kMaxPayload = (std::size_t{1} << 24) - 1;
inline constexpr std::size_t kTagSize = 32;
/// Frame with a zero-length sender and payload.
inline constexpr std::size_t kMinFrame = 4 + 1 + 1 + 1 + 8 + 3 + kTagSize;

struct FederationMessage {
    std::uint8_t version = kProtocolVersion;
    MsgType type = MsgType::Query;
    IxpId sender;
    std::uint64_t sequence = 0;
    std::string payload;

    friend bool operator==(const FederationMessage&, const FederationMessage&) = default;
};

/// Frame layout, big-endian:
///   u32 total length (whole frame) | u8 version | u8 type |
///   u8 sender length, sender | u64 sequence | u24 payload length, payload |
///   HMAC-SHA256 over everything before it.
/// Throws Error(PayloadTooLarge).
Bytes encode_message(const FederationMessage& msg, const Key& key);

/// Tracks the highest sequence accepted from each sender in one session.
class SessionState {
public:
    /// Throws Error(ReplayDetected) unless `sequence` exceeds the last one
    /// accepted from `sender`; records it otherwise.
    void accept(const IxpId& sender, std::uint64_t sequence);
    std::optional<std::uint64_t> last(const IxpId& sender) const;

private:
    std::map<IxpId, std::uint64_t> last_;
};

/// Decodes exactly one frame occupying all of `frame`. The tag is checked
/// before any field is interpreted, so damage anywhere in the frame is an
/// AuthFailure. Throws Error(Truncated | AuthFailure | BadVersion |
/// MalformedPayload), and ReplayDetected when `session` is given.
FederationMessage decode_message(ByteView frame, const Key& key, SessionState* session = nullptr);

/// Declared total length from the first 4 octets, for stream framing.
std::optional<std::uint32_t> peek_frame_length(ByteView prefix) noexcept;
/// Unauthenticated sender field, used only to choose which key to verify with.
std::optional<std::string> peek_sender(ByteView frame) noexcept;

// ---------------------------------------------------------------------------
// Payloads (JSON text)

struct ObservationClaim {
    IpPrefix prefix;
    std::set<Asn> origins_seen;
    std::int64_t first_seen = 0;
    std::int64_t last_seen = 0;
    IxpId claimant;

    friend bool operator==(const ObservationClaim&, const ObservationClaim&) = default;
};

std::string encode_query(const IpPrefix& prefix);
IpPrefix decode_query(std::string_view payload);

std::string encode_claims(const std::vector<ObservationClaim>& claims);
std::vector<ObservationClaim> decode_claims(std::string_view payload);

std::string encode_observations(const std::vector<RouteAnnouncement>& anns);
std::vector<RouteAnnouncement> decode_observations(std::string_view payload);

std::string encode_digest(const Digest& digest);
Digest decode_digest(std::string_view payload);

// ---------------------------------------------------------------------------
// Logic

/// Claims for the queried prefix and every stored prefix covering it,
/// shortest first; empty when nothing is known.
std::vector<ObservationClaim> handle_query(const ObservationHistory& history, const IpPrefix& prefix,
                                           const IxpId& local);

struct QuorumPolicy {
    std::size_t min_responders = 2;
    /// Corroborated when agreeing / responders >= numerator / denominator.
    std::uint32_t quorum_numerator = 1;
    std::uint32_t quorum_denominator = 2;
};

enum class CrossState : std::uint8_t { Corroborated, Disputed, Unknown };

std::string_view to_string(CrossState s) noexcept;

struct CrossValidation {
    CrossState state = CrossState::Unknown;
    std::size_t responders = 0;
    std::size_t agreeing = 0;

    friend bool operator==(const CrossValidation&, const CrossValidation&) = default;
};

/// responders: distinct claimants with a claim covering ann.prefix.
/// agreeing: those of them with such a claim listing ann's origin.
CrossValidation cross_validate(const RouteAnnouncement& ann, const std::vector<ObservationClaim>& claims,
                               const QuorumPolicy& policy);

/// SHA-256 over the canonical member/prefix listing. The source IXP and
/// version are not part of the digest.
Digest whitelist_digest(const Whitelist& wl);

// ---------------------------------------------------------------------------
// Peers

struct PeerConfig {
    IxpId id;
    std::string address;  // host:port
    Key key{};
};

struct FederationConfig {
    IxpId self;
    std::string listen;  // host:port
    std::vector<PeerConfig> peers;

    const PeerConfig* find(const IxpId& id) const;
};

/// {"self": "ixp-a", "listen": "127.0.0.1:7400",
///  "peers": [{"id": "ixp-b", "address": "127.0.0.1:7401", "key": "<64 hex>"}]}
/// Throws Error(SchemaError | InvalidIxpId).
FederationConfig load_federation_config(std::string_view document);
FederationConfig load_federation_config_file(const std::filesystem::path& path);

/// Federation endpoint state for one IXP. Every frame is handled under one
/// lock, so concurrent sessions see a single writer.
class FederationNode {
public:
    /// Outbound sequence numbers start at `first_sequence`; a daemon that
    /// restarts should pick a value above anything it sent before.
    FederationNode(IxpId self, ObservationHistory& history, Whitelist local_whitelist = {},
                   std::uint64_t first_sequence = 1);

    const IxpId& self() const noexcept { return self_; }

    void add_peer(const IxpId& peer, const Key& key);
    bool has_peer(const IxpId& peer) const;

    /// Verifies and dispatches one inbound frame and returns the reply frame,
    /// if the message type has one. Query -> Response; WhitelistDigest ->
    /// WhitelistSync when digests differ, else a WhitelistDigest echo;
    /// ObservationPush and WhitelistSync -> no reply. Throws the codec's
    /// errors (and UnknownPeer) after counting them.
    std::optional<Bytes> handle_frame(ByteView frame, SessionState& session);

    /// Outbound frame to `peer` with the next sequence number.
    Bytes make_frame(const IxpId& peer, MsgType type, std::string payload);
    /// Decodes a reply from `peer`.
    FederationMessage open_frame(const IxpId& peer, ByteView frame, SessionState& session);

    /// Local whitelist merged with every synchronized peer whitelist.
    Whitelist cluster_whitelist() const;
    std::map<IxpId, Whitelist> peer_whitelists() const;
    Digest local_digest() const;

    std::uint64_t auth_failures() const noexcept { return auth_failures_.load(); }
    std::uint64_t replays() const noexcept { return replays_.load(); }

    /// Runs `fn(history)` under the node lock.
    template <typename Fn>
    decltype(auto) with_history(Fn&& fn)
    {
        std::lock_guard lock(mu_);
        return fn(history_);
    }

private:
    const Key& key_for(const IxpId& peer) const;

    IxpId self_;
    ObservationHistory& history_;
    Whitelist local_whitelist_;
    std::map<IxpId, Whitelist> peer_whitelists_;
    std::map<IxpId, Key> keys_;
    std::uint64_t next_sequence_ = 1;
    mutable std::mutex mu_;
    std::atomic<std::uint64_t> auth_failures_{0};
    std::atomic<std::uint64_t> replays_{0};
};

/// What the policy engine needs from the federation.
class FederationClient {
public:
    virtual ~FederationClient() = default;
    /// Claims gathered from reachable peers. Throws Error(Transport) when
    /// no peer could be asked.
    virtual std::vector<ObservationClaim> query(const IpPrefix& prefix) = 0;
    /// Shares raw observations with every peer.
    virtual void push(const std::vector<RouteAnnouncement>& anns) = 0;
    /// Number of Query frames sent so far.
    virtual std::uint64_t queries_sent() const noexcept = 0;
};

/// In-process client: frames go straight to the peer nodes' handle_frame,
/// through the real codec, in order.
class LoopbackFederationClient : public FederationClient {
public:
    explicit LoopbackFederationClient(FederationNode& self) : self_(self) {}

    /// `peer` must have `self` registered under the same key.
    void connect(FederationNode& peer);

    std::vector<ObservationClaim> query(const IpPrefix& prefix) override;
    void push(const std::vector<RouteAnnouncement>& anns) override;
    std::uint64_t queries_sent() const noexcept override { return queries_; }

private:
    struct Link {
        FederationNode* peer;
        SessionState outbound;  // at the peer
        SessionState inbound;   // replies from the peer
    };

    FederationNode& self_;
    std::vector<Link> links_;
    std::uint64_t queries_ = 0;
};

}  // namespace bgpsecx
