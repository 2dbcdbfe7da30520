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

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace vqpu::net {

/// host:port pair; parse() accepts "host:port".
struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    std::string str() const { return host + ":" + std::to_string(port); }
    static Endpoint parse(std::string_view text);

    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

/// Owning file descriptor for a stream socket.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket() { close(); }
    Socket(Socket&& other) noexcept : fd_(other.release()) {}
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    int release();
    void close();

private:
    int fd_ = -1;
};

/// Connects with TCP_NODELAY set. Throws PeerUnreachable.
Socket connect_to(const Endpoint& ep, std::chrono::milliseconds timeout = std::chrono::seconds(5));

/// Listening socket; port 0 picks a free port. Throws BindFailure.
class Listener {
public:
    static Listener bind(const std::string& host, std::uint16_t port);

    std::uint16_t port() const { return port_; }
    int fd() const { return sock_.fd(); }
    Socket accept();

private:
    Socket sock_;
    std::uint16_t port_ = 0;
};

inline constexpr std::size_t kMaxFrameBytes = std::size_t{1} << 28;

/// Frame = 4-byte big-endian length + payload. Throws TransportError.
void write_frame(Socket& s, std::string_view payload);
/// nullopt on orderly EOF before a frame starts. Throws TransportError on
/// errors, truncation, oversize frames or timeout.
std::optional<std::string> read_frame(Socket& s,
                                      std::optional<std::chrono::milliseconds> timeout = {});

void send_json(Socket& s, const nlohmann::json& msg);
std::optional<nlohmann::json> recv_json(Socket& s,
                                        std::optional<std::chrono::milliseconds> timeout = {});

std::string encode_length(std::size_t n);
std::size_t decode_length(const unsigned char* p);

}  // namespace vqpu::net
