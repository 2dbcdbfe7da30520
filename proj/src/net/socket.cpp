// Copyright 2026 The vqpu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vqpu/net/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "vqpu/error.hpp"

namespace vqpu::net {

namespace {

std::string sys_error(const std::string& what) { return what + ": " + std::strerror(errno); }

sockaddr_in resolve(const Endpoint& ep) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    const std::string host = ep.host == "localhost" ? "127.0.0.1" : ep.host;
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
        throw Error(ErrorCode::PeerUnreachable, "cannot resolve " + ep.host);
    }
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    ::freeaddrinfo(res);
    return addr;
}

// Waits for `events` on fd; false on timeout.
bool wait_for(int fd, short events, std::optional<std::chrono::milliseconds> timeout) {
    pollfd p{fd, events, 0};
    const int ms = timeout ? static_cast<int>(timeout->count()) : -1;
    for (;;) {
        const int r = ::poll(&p, 1, ms);
        if (r > 0) return true;
        if (r == 0) return false;
        if (errno != EINTR) throw Error(ErrorCode::TransportError, sys_error("poll"));
    }
}

void read_exact(Socket& s, char* buf, std::size_t n, bool allow_eof_at_start,
                bool* eof, std::optional<std::chrono::milliseconds> timeout) {
    std::size_t got = 0;
    while (got < n) {
        if (timeout && !wait_for(s.fd(), POLLIN, timeout)) {
            throw Error(ErrorCode::TransportError, "timed out waiting for frame");
        }
        const ssize_t r = ::recv(s.fd(), buf + got, n - got, 0);
        if (r > 0) {
            got += static_cast<std::size_t>(r);
            continue;
        }
        if (r == 0) {
            if (got == 0 && allow_eof_at_start) {
                *eof = true;
                return;
            }
            throw Error(ErrorCode::TransportError, "connection closed mid-frame");
        }
        if (errno == EINTR) continue;
        throw Error(ErrorCode::TransportError, sys_error("recv"));
    }
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
        throw Error(ErrorCode::InvalidArgument, "endpoint must be host:port, got '" +
                                                    std::string(text) + "'");
    }
    Endpoint ep;
    ep.host = std::string(text.substr(0, colon));
    const std::string port(text.substr(colon + 1));
    try {
        std::size_t used = 0;
        const unsigned long p = std::stoul(port, &used);
        if (used != port.size() || p > 65535) throw std::out_of_range("port");
        ep.port = static_cast<std::uint16_t>(p);
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "bad port in '" + std::string(text) + "'");
    }
    return ep;
}

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.release();
    }
    return *this;
}

int Socket::release() {
    const int fd = fd_;
    fd_ = -1;
    return fd;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

Socket connect_to(const Endpoint& ep, std::chrono::milliseconds timeout) {
    const sockaddr_in addr = resolve(ep);
    Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!s.valid()) throw Error(ErrorCode::PeerUnreachable, sys_error("socket"));
    const int flags = ::fcntl(s.fd(), F_GETFL, 0);
    ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
    int r = ::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr);
    if (r != 0 && errno != EINPROGRESS) {
        throw Error(ErrorCode::PeerUnreachable, sys_error("connect " + ep.str()));
    }
    if (r != 0) {
        if (!wait_for(s.fd(), POLLOUT, timeout)) {
            throw Error(ErrorCode::PeerUnreachable, "connect " + ep.str() + ": timed out");
        }
        int err = 0;
        socklen_t len = sizeof err;
        ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
        if (err != 0) {
            errno = err;
            throw Error(ErrorCode::PeerUnreachable, sys_error("connect " + ep.str()));
        }
    }
    ::fcntl(s.fd(), F_SETFL, flags);
    int one = 1;
    ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return s;
}

Listener Listener::bind(const std::string& host, std::uint16_t port) {
    Listener l;
    l.sock_ = Socket(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!l.sock_.valid()) throw Error(ErrorCode::BindFailure, sys_error("socket"));
    int one = 1;
    ::setsockopt(l.sock_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    try {
        addr = resolve({host, port});
    } catch (const Error& e) {
        throw Error(ErrorCode::BindFailure, e.detail());
    }
    if (::bind(l.sock_.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        throw Error(ErrorCode::BindFailure, sys_error("bind " + host + ":" + std::to_string(port)));
    }
    if (::listen(l.sock_.fd(), 128) != 0) throw Error(ErrorCode::BindFailure, sys_error("listen"));
    socklen_t len = sizeof addr;
    ::getsockname(l.sock_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    l.port_ = ntohs(addr.sin_port);
    return l;
}

Socket Listener::accept() {
    for (;;) {
        const int fd = ::accept4(sock_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
        if (fd >= 0) {
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return Socket(fd);
        }
        if (errno == EINTR) continue;
        throw Error(ErrorCode::TransportError, sys_error("accept"));
    }
}

std::string encode_length(std::size_t n) {
    std::string out(4, '\0');
    out[0] = static_cast<char>((n >> 24) & 0xFF);
    out[1] = static_cast<char>((n >> 16) & 0xFF);
    out[2] = static_cast<char>((n >> 8) & 0xFF);
    out[3] = static_cast<char>(n & 0xFF);
    return out;
}

std::size_t decode_length(const unsigned char* p) {
    return (std::size_t{p[0]} << 24) | (std::size_t{p[1]} << 16) | (std::size_t{p[2]} << 8) |
           std::size_t{p[3]};
}

void write_frame(Socket& s, std::string_view payload) {
    if (payload.size() > kMaxFrameBytes) throw Error(ErrorCode::TransportError, "frame too large");
    const std::string buf = encode_length(payload.size()).append(payload);
    std::size_t sent = 0;
    while (sent < buf.size()) {
        const ssize_t r = ::send(s.fd(), buf.data() + sent, buf.size() - sent, MSG_NOSIGNAL);
        if (r > 0) {
            sent += static_cast<std::size_t>(r);
            continue;
        }
        if (r < 0 && errno == EINTR) continue;
        throw Error(ErrorCode::TransportError, sys_error("send"));
    }
}

std::optional<std::string> read_frame(Socket& s, std::optional<std::chrono::milliseconds> timeout) {
    unsigned char header[4];
    bool eof = false;
    read_exact(s, reinterpret_cast<char*>(header), 4, true, &eof, timeout);
    if (eof) return std::nullopt;
    const std::size_t n = decode_length(header);
    if (n > kMaxFrameBytes) throw Error(ErrorCode::TransportError, "oversized frame");
    std::string payload(n, '\0');
    read_exact(s, payload.data(), n, false, &eof, timeout);
    return payload;
}

void send_json(Socket& s, const nlohmann::json& msg) { write_frame(s, msg.dump()); }

std::optional<nlohmann::json> recv_json(Socket& s, std::optional<std::chrono::milliseconds> timeout) {
    auto frame = read_frame(s, timeout);
    if (!frame) return std::nullopt;
    try {
        return nlohmann::json::parse(*frame);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ProtocolError, std::string("frame is not JSON: ") + e.what());
    }
}

}  // namespace vqpu::net
