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

#include <spdlog/spdlog.h>

#include "bgpsecx/error.hpp"
#include "bgpsecx/federation.hpp"

namespace bgpsecx {

FederationNode::FederationNode(IxpId self, ObservationHistory& history, Whitelist local_whitelist,
                               std::uint64_t first_sequence)
    : self_(std::move(self)),
      history_(history),
      local_whitelist_(std::move(local_whitelist)),
      next_sequence_(first_sequence)
{
}

void FederationNode::add_peer(const IxpId& peer, const Key& key)
{
    std::lock_guard lock(mu_);
    keys_[peer] = key;
}

bool FederationNode::has_peer(const IxpId& peer) const
{
    std::lock_guard lock(mu_);
    return keys_.contains(peer);
}

const Key& FederationNode::key_for(const IxpId& peer) const
{
    auto it = keys_.find(peer);
    if (it == keys_.end()) throw Error(Errc::UnknownPeer, peer.str());
    return it->second;
}

std::optional<Bytes> FederationNode::handle_frame(ByteView frame, SessionState& session)
{
    std::lock_guard lock(mu_);
    FederationMessage msg;
    try {
        const auto sender = peek_sender(frame);
        if (!sender || !IxpId::is_valid(*sender) || !keys_.contains(IxpId::make(*sender))) {
            throw Error(Errc::UnknownPeer, sender ? *sender : std::string("<unreadable>"));
        }
        msg = decode_message(frame, keys_.at(IxpId::make(*sender)), &session);
    } catch (const Error& e) {
        if (e.code() == Errc::AuthFailure || e.code() == Errc::UnknownPeer) ++auth_failures_;
        if (e.code() == Errc::ReplayDetected) ++replays_;
        spdlog::warn("{}: dropped frame: {}", self_.str(), e.what());
        throw;
    }

    const Key& key = key_for(msg.sender);
    auto reply = [&](MsgType type, std::string payload) {
        return encode_message(FederationMessage{kProtocolVersion, type, self_, next_sequence_++, std::move(payload)},
                              key);
    };

    switch (msg.type) {
    case MsgType::Query: {
        const IpPrefix prefix = decode_query(msg.payload);
        return reply(MsgType::Response, encode_claims(handle_query(history_, prefix, self_)));
    }
    case MsgType::ObservationPush: {
        for (const auto& ann : decode_observations(msg.payload)) history_.record(ann, msg.sender);
        return std::nullopt;
    }
    case MsgType::WhitelistDigest: {
        const Digest theirs = decode_digest(msg.payload);
        const Digest ours = whitelist_digest(local_whitelist_);
        if (theirs == ours) return reply(MsgType::WhitelistDigest, encode_digest(ours));
        return reply(MsgType::WhitelistSync, dump_whitelist(local_whitelist_));
    }
    case MsgType::WhitelistSync: {
        try {
            peer_whitelists_[msg.sender] = load_whitelist(msg.payload);
        } catch (const Error& e) {
            throw Error(Errc::MalformedPayload, e.what());
        }
        return std::nullopt;
    }
    case MsgType::Response:
        return std::nullopt;
    }
    return std::nullopt;
}

Bytes FederationNode::make_frame(const IxpId& peer, MsgType type, std::string payload)
{
    std::lock_guard lock(mu_);
    return encode_message(FederationMessage{kProtocolVersion, type, self_, next_sequence_++, std::move(payload)},
                          key_for(peer));
}

FederationMessage FederationNode::open_frame(const IxpId& peer, ByteView frame, SessionState& session)
{
    Key key;
    {
        std::lock_guard lock(mu_);
        key = key_for(peer);
    }
    try {
        FederationMessage msg = decode_message(frame, key, &session);
        if (msg.sender != peer) throw Error(Errc::UnknownPeer, "reply from " + msg.sender.str());
        if (msg.type == MsgType::WhitelistSync) {
            Whitelist wl = load_whitelist(msg.payload);
            std::lock_guard lock(mu_);
            peer_whitelists_[peer] = std::move(wl);
        }
        return msg;
    } catch (const Error& e) {
        if (e.code() == Errc::AuthFailure || e.code() == Errc::UnknownPeer) ++auth_failures_;
        if (e.code() == Errc::ReplayDetected) ++replays_;
        throw;
    }
}

Whitelist FederationNode::cluster_whitelist() const
{
    std::lock_guard lock(mu_);
    std::vector<Whitelist> all{local_whitelist_};
    for (const auto& [id, wl] : peer_whitelists_) all.push_back(wl);
    return merge_cluster(all);
}

std::map<IxpId, Whitelist> FederationNode::peer_whitelists() const
{
    std::lock_guard lock(mu_);
    return peer_whitelists_;
}

Digest FederationNode::local_digest() const
{
    std::lock_guard lock(mu_);
    return whitelist_digest(local_whitelist_);
}

void LoopbackFederationClient::connect(FederationNode& peer)
{
    links_.push_back(Link{&peer, {}, {}});
}

std::vector<ObservationClaim> LoopbackFederationClient::query(const IpPrefix& prefix)
{
    if (links_.empty()) throw Error(Errc::Transport, "no federation peers");
    std::vector<ObservationClaim> claims;
    std::size_t answered = 0;
    for (auto& link : links_) {
        const IxpId& peer = link.peer->self();
        try {
            Bytes frame = self_.make_frame(peer, MsgType::Query, encode_query(prefix));
            ++queries_;
            auto reply = link.peer->handle_frame(frame, link.outbound);
            if (!reply) continue;
            FederationMessage msg = self_.open_frame(peer, *reply, link.inbound);
            if (msg.type != MsgType::Response) continue;
            for (auto& c : decode_claims(msg.payload)) {
                // A peer may only speak for itself.
                if (c.claimant == peer) claims.push_back(std::move(c));
            }
            ++answered;
        } catch (const Error& e) {
            spdlog::debug("query to {} failed: {}", peer.str(), e.what());
        }
    }
    if (answered == 0) throw Error(Errc::Transport, "no peer answered");
    return claims;
}

void LoopbackFederationClient::push(const std::vector<RouteAnnouncement>& anns)
{
    if (anns.empty()) return;
    const std::string payload = encode_observations(anns);
    for (auto& link : links_) {
        try {
            Bytes frame = self_.make_frame(link.peer->self(), MsgType::ObservationPush, payload);
            link.peer->handle_frame(frame, link.outbound);
        } catch (const Error& e) {
            spdlog::debug("push to {} failed: {}", link.peer->self().str(), e.what());
        }
    }
}

}  // namespace bgpsecx
