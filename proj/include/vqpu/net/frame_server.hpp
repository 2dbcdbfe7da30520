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

#include <atomic>
#include <chrono>
#include <functional>
#include <optional>

#include <json.hpp>

#include "vqpu/error.hpp"
#include "vqpu/net/socket.hpp"

namespace vqpu::net {

/// Single-threaded poll() loop: accepts connections, splits the byte stream
/// into frames and hands each decoded message to the handler. A returned
/// json is written back on the same connection; nullopt sends nothing.
class FrameServer {
public:
    using Handler = std::function<std::optional<nlohmann::json>(const nlohmann::json&)>;
    using Tick = std::function<void()>;

    FrameServer(Listener listener, Handler handler, Tick on_tick = {},
                std::chrono::milliseconds tick_period = std::chrono::milliseconds(50));
    ~FrameServer();
    FrameServer(const FrameServer&) = delete;
    FrameServer& operator=(const FrameServer&) = delete;

    std::uint16_t port() const { return listener_.port(); }

    /// Serves until stop() is called.
    void run();
    /// Thread-safe; wakes the loop.
    void stop();

private:
    Listener listener_;
    Handler handler_;
    Tick on_tick_;
    std::chrono::milliseconds tick_period_;
    int wake_fd_[2] = {-1, -1};
    std::atomic<bool> stopping_{false};
};

/// Builds {"type":"error","code":...,"message":...}.
nlohmann::json error_reply(ErrorCode code, const std::string& message);

}  // namespace vqpu::net
