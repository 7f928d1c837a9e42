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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bgpsecx/federation.hpp"

namespace bgpsecx {

/// Splits "host:port" ("[v6]:port" also accepted). Throws Error(SchemaError).
std::pair<std::string, std::uint16_t> split_host_port(std::string_view address);

/// Length-prefixed frame exchange over TCP. One thread per connection; all
/// frames go through FederationNode::handle_frame, which serializes them.
/// A connection is dropped on the first frame that fails to verify.
class TcpFederationServer {
public:
    TcpFederationServer(FederationNode& node, std::string listen);
    ~TcpFederationServer();

    TcpFederationServer(const TcpFederationServer&) = delete;
    TcpFederationServer& operator=(const TcpFederationServer&) = delete;

    /// Throws Error(Transport) if the address cannot be bound.
    void bind();
    /// Bound port (useful when listening on port 0).
    std::uint16_t port() const noexcept { return port_; }

    /// Accepts connections until `stop` becomes true.
    void run(const std::atomic<bool>& stop);

    std::uint64_t frames_handled() const noexcept { return frames_.load(); }
    std::uint64_t connections_dropped() const noexcept { return dropped_.load(); }

private:
    void serve_connection(int fd, const std::atomic<bool>& stop);

    FederationNode& node_;
    std::string listen_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    SessionState session_;
    std::atomic<std::uint64_t> frames_{0};
    std::atomic<std::uint64_t> dropped_{0};
};

/// FederationClient over TCP, one short connection per exchange.
class TcpFederationClient : public FederationClient {
public:
    TcpFederationClient(FederationNode& self, std::vector<PeerConfig> peers,
                        std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));

    std::vector<ObservationClaim> query(const IpPrefix& prefix) override;
    void push(const std::vector<RouteAnnouncement>& anns) override;
    std::uint64_t queries_sent() const noexcept override { return queries_; }

    /// Sends our whitelist digest to `peer`; a differing peer answers with
    /// its whitelist, which the node stores. Returns the reply type.
    MsgType exchange_digest(const IxpId& peer);

    /// Sends one raw frame to `peer` and waits for a reply frame if
    /// `expect_reply`. Throws Error(Transport).
    std::optional<Bytes> send_frame(const PeerConfig& peer, ByteView frame, bool expect_reply);

private:
    FederationNode& self_;
    std::vector<PeerConfig> peers_;
    std::chrono::milliseconds timeout_;
    std::map<IxpId, SessionState> inbound_;
    std::uint64_t queries_ = 0;
};

}  // namespace bgpsecx
