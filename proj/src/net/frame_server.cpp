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

#include "vqpu/net/frame_server.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <map>
#include <string>
#include <vector>

#include "vqpu/error.hpp"

namespace vqpu::net {

using nlohmann::json;

json error_reply(ErrorCode code, const std::string& message) {
    return json{{"type", "error"}, {"code", std::string(error_code_name(code))}, {"message", message}};
}

FrameServer::FrameServer(Listener listener, Handler handler, Tick on_tick,
                         std::chrono::milliseconds tick_period)
    : listener_(std::move(listener)),
      handler_(std::move(handler)),
      on_tick_(std::move(on_tick)),
      tick_period_(tick_period) {
    if (::pipe2(wake_fd_, O_CLOEXEC | O_NONBLOCK) != 0) {
        throw Error(ErrorCode::Internal, "cannot create wake pipe");
    }
}

FrameServer::~FrameServer() {
    for (int fd : wake_fd_)
        if (fd >= 0) ::close(fd);
}

void FrameServer::stop() {
    stopping_ = true;
    const char b = 1;
    [[maybe_unused]] auto r = ::write(wake_fd_[1], &b, 1);
}

void FrameServer::run() {
    struct Conn {
        Socket sock;
        std::string buffer;
    };
    std::map<int, Conn> conns;
    auto next_tick = std::chrono::steady_clock::now() + tick_period_;

    while (!stopping_) {
        std::vector<pollfd> fds;
        fds.push_back({listener_.fd(), POLLIN, 0});
        fds.push_back({wake_fd_[0], POLLIN, 0});
        for (const auto& [fd, c] : conns) fds.push_back({fd, POLLIN, 0});

        const auto now = std::chrono::steady_clock::now();
        const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(next_tick - now);
        const int r = ::poll(fds.data(), fds.size(), static_cast<int>(std::max<long>(0, wait.count())));
        if (r < 0 && errno != EINTR) throw Error(ErrorCode::TransportError, "poll failed");

        if (std::chrono::steady_clock::now() >= next_tick) {
            if (on_tick_) on_tick_();
            next_tick = std::chrono::steady_clock::now() + tick_period_;
        }
        if (r <= 0) continue;
        if (fds[1].revents & POLLIN) {
            char drain[64];
            while (::read(wake_fd_[0], drain, sizeof drain) > 0) {
            }
        }
        if (fds[0].revents & POLLIN) {
            try {
                Socket s = listener_.accept();
                const int fd = s.fd();
                conns[fd] = Conn{std::move(s), {}};
            } catch (const Error&) {
                // Transient accept failures are ignored; the client retries.
            }
        }
        for (std::size_t i = 2; i < fds.size(); ++i) {
            if (fds[i].revents == 0) continue;
            auto it = conns.find(fds[i].fd);
            if (it == conns.end()) continue;
            Conn& c = it->second;
            char buf[65536];
            const ssize_t n = ::recv(c.sock.fd(), buf, sizeof buf, MSG_DONTWAIT);
            if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
                conns.erase(it);
                continue;
            }
            if (n < 0) continue;
            c.buffer.append(buf, static_cast<std::size_t>(n));
            bool drop = false;
            while (c.buffer.size() >= 4) {
                const std::size_t len =
                    decode_length(reinterpret_cast<const unsigned char*>(c.buffer.data()));
                if (len > kMaxFrameBytes) {
                    drop = true;
                    break;
                }
                if (c.buffer.size() < 4 + len) break;
                const std::string payload = c.buffer.substr(4, len);
                c.buffer.erase(0, 4 + len);
                std::optional<json> reply;
                try {
                    reply = handler_(json::parse(payload));
                } catch (const json::exception& e) {
                    reply = error_reply(ErrorCode::ProtocolError, e.what());
                } catch (const Error& e) {
                    reply = error_reply(e.code(), e.detail());
                } catch (const std::exception& e) {
                    reply = error_reply(ErrorCode::Internal, e.what());
                }
                if (reply) {
                    try {
                        send_json(c.sock, *reply);
                    } catch (const Error&) {
                        drop = true;
                        break;
                    }
                }
            }
            if (drop) conns.erase(it);
        }
    }
}

}  // namespace vqpu::net
