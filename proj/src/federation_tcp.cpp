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

#include "bgpsecx/federation_tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <thread>

#include <spdlog/spdlog.h>

#include "bgpsecx/error.hpp"

namespace bgpsecx {

namespace {

constexpr std::size_t kMaxFrame = kMinFrame + 255 + kMaxPayload;
constexpr int kPollMs = 200;

class Fd {
public:
    explicit Fd(int fd = -1) : fd_(fd) {}
    ~Fd()
    {
        if (fd_ >= 0) ::close(fd_);
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    int get() const noexcept { return fd_; }

private:
    int fd_;
};

[[noreturn]] void transport(const std::string& what)
{
    throw Error(Errc::Transport, what + ": " + std::strerror(errno));
}

struct AddrInfoFree {
    void operator()(addrinfo* ai) const noexcept { ::freeaddrinfo(ai); }
};

std::unique_ptr<addrinfo, AddrInfoFree> resolve(const std::string& host, std::uint16_t port, bool passive)
{
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
    if (rc != 0) throw Error(Errc::Transport, "resolve " + host + ": " + ::gai_strerror(rc));
    return std::unique_ptr<addrinfo, AddrInfoFree>(res);
}

/// Reads exactly out.size() octets. Returns false on clean EOF before any
/// octet, or when `stop` is raised while idle.
bool read_exact(int fd, std::span<std::uint8_t> out, const std::atomic<bool>* stop)
{
    std::size_t got = 0;
    while (got < out.size()) {
        if (stop != nullptr) {
            pollfd p{fd, POLLIN, 0};
            const int rc = ::poll(&p, 1, kPollMs);
            if (rc == 0) {
                if (stop->load()) return false;
                continue;
            }
            if (rc < 0 && errno == EINTR) continue;
            if (rc < 0) transport("poll");
        }
        const ssize_t n = ::recv(fd, out.data() + got, out.size() - got, 0);
        if (n == 0) {
            if (got == 0) return false;
            throw Error(Errc::Truncated, "connection closed mid-frame");
        }
        if (n < 0) {
            if (errno == EINTR) continue;
            transport("recv");
        }
        got += static_cast<std::size_t>(n);
    }
    return true;
}

void write_all(int fd, ByteView data)
{
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            transport("send");
        }
        sent += static_cast<std::size_t>(n);
    }
}

/// One frame off the stream, or nullopt at EOF.
std::optional<Bytes> read_frame(int fd, const std::atomic<bool>* stop)
{
    Bytes frame(4);
    if (!read_exact(fd, frame, stop)) return std::nullopt;
    const std::uint32_t total = *peek_frame_length(frame);
    if (total < kMinFrame || total > kMaxFrame) {
        throw Error(Errc::Truncated, "frame length " + std::to_string(total) + " out of range");
    }
    frame.resize(total);
    if (!read_exact(fd, std::span<std::uint8_t>(frame).subspan(4), stop)) {
        throw Error(Errc::Truncated, "connection closed mid-frame");
    }
    return frame;
}

}  // namespace

std::pair<std::string, std::uint16_t> split_host_port(std::string_view address)
{
    std::string_view host;
    std::string_view port;
    if (!address.empty() && address.front() == '[') {
        const auto close = address.find(']');
        if (close == std::string_view::npos || close + 1 >= address.size() || address[close + 1] != ':') {
            throw Error(Errc::SchemaError, "bad address '" + std::string(address) + "'");
        }
        host = address.substr(1, close - 1);
        port = address.substr(close + 2);
    } else {
        const auto colon = address.rfind(':');
        if (colon == std::string_view::npos) {
            throw Error(Errc::SchemaError, "address '" + std::string(address) + "' needs host:port");
        }
        host = address.substr(0, colon);
        port = address.substr(colon + 1);
    }
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || ptr != port.data() + port.size() || value > 65535) {
        throw Error(Errc::SchemaError, "bad port in '" + std::string(address) + "'");
    }
    return {std::string(host), static_cast<std::uint16_t>(value)};
}

TcpFederationServer::TcpFederationServer(FederationNode& node, std::string listen)
    : node_(node), listen_(std::move(listen))
{
}

TcpFederationServer::~TcpFederationServer()
{
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpFederationServer::bind()
{
    const auto [host, port] = split_host_port(listen_);
    auto res = resolve(host, port, true);
    for (addrinfo* ai = res.get(); ai != nullptr; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        const int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
            sockaddr_storage bound{};
            socklen_t len = sizeof bound;
            ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
            port_ = ntohs(bound.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                                                       : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
            listen_fd_ = fd;
            return;
        }
        ::close(fd);
    }
    transport("cannot bind " + listen_);
}

void TcpFederationServer::run(const std::atomic<bool>& stop)
{
    if (listen_fd_ < 0) bind();
    std::vector<std::thread> workers;
    while (!stop.load()) {
        pollfd p{listen_fd_, POLLIN, 0};
        const int rc = ::poll(&p, 1, kPollMs);
        if (rc <= 0) continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        workers.emplace_back([this, fd, &stop] { serve_connection(fd, stop); });
    }
    for (auto& t : workers) t.join();
}

void TcpFederationServer::serve_connection(int raw_fd, const std::atomic<bool>& stop)
{
    Fd fd(raw_fd);
    try {
        while (auto frame = read_frame(fd.get(), &stop)) {
            auto reply = node_.handle_frame(*frame, session_);
            ++frames_;
            if (reply) write_all(fd.get(), *reply);
        }
    } catch (const Error& e) {
        ++dropped_;
        spdlog::info("{}: connection dropped: {}", node_.self().str(), e.what());
    }
}

TcpFederationClient::TcpFederationClient(FederationNode& self, std::vector<PeerConfig> peers,
                                         std::chrono::milliseconds timeout)
    : self_(self), peers_(std::move(peers)), timeout_(timeout)
{
    for (const auto& p : peers_) self_.add_peer(p.id, p.key);
}

std::optional<Bytes> TcpFederationClient::send_frame(const PeerConfig& peer, ByteView frame, bool expect_reply)
{
    const auto [host, port] = split_host_port(peer.address);
    auto res = resolve(host, port, false);
    for (addrinfo* ai = res.get(); ai != nullptr; ai = ai->ai_next) {
        Fd fd(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
        if (fd.get() < 0) continue;
        timeval tv{};
        tv.tv_sec = static_cast<time_t>(timeout_.count() / 1000);
        tv.tv_usec = static_cast<suseconds_t>((timeout_.count() % 1000) * 1000);
        ::setsockopt(fd.get(), SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
        ::setsockopt(fd.get(), SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
        if (::connect(fd.get(), ai->ai_addr, ai->ai_addrlen) != 0) continue;
        write_all(fd.get(), frame);
        if (!expect_reply) return std::nullopt;
        auto reply = read_frame(fd.get(), nullptr);
        if (!reply) throw Error(Errc::Transport, peer.id.str() + " closed without replying");
        return reply;
    }
    transport("cannot connect to " + peer.address);
}

std::vector<ObservationClaim> TcpFederationClient::query(const IpPrefix& prefix)
{
    if (peers_.empty()) throw Error(Errc::Transport, "no federation peers");
    std::vector<ObservationClaim> claims;
    std::size_t answered = 0;
    for (const auto& peer : peers_) {
        try {
            Bytes frame = self_.make_frame(peer.id, MsgType::Query, encode_query(prefix));
            ++queries_;
            auto reply = send_frame(peer, frame, true);
            FederationMessage msg = self_.open_frame(peer.id, *reply, inbound_[peer.id]);
            if (msg.type != MsgType::Response) continue;
            for (auto& c : decode_claims(msg.payload)) {
                if (c.claimant == peer.id) claims.push_back(std::move(c));
            }
            ++answered;
        } catch (const Error& e) {
            spdlog::warn("query to {} failed: {}", peer.id.str(), e.what());
        }
    }
    if (answered == 0) throw Error(Errc::Transport, "no peer answered");
    return claims;
}

void TcpFederationClient::push(const std::vector<RouteAnnouncement>& anns)
{
    if (anns.empty()) return;
    const std::string payload = encode_observations(anns);
    for (const auto& peer : peers_) {
        try {
            send_frame(peer, self_.make_frame(peer.id, MsgType::ObservationPush, payload), false);
        } catch (const Error& e) {
            spdlog::warn("push to {} failed: {}", peer.id.str(), e.what());
        }
    }
}

MsgType TcpFederationClient::exchange_digest(const IxpId& peer_id)
{
    for (const auto& peer : peers_) {
        if (peer.id != peer_id) continue;
        Bytes frame = self_.make_frame(peer.id, MsgType::WhitelistDigest, encode_digest(self_.local_digest()));
        auto reply = send_frame(peer, frame, true);
        return self_.open_frame(peer.id, *reply, inbound_[peer.id]).type;
    }
    throw Error(Errc::UnknownPeer, peer_id.str());
}

}  // namespace bgpsecx
