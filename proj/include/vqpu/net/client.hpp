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
#include <functional>
#include <mutex>

#include <json.hpp>

#include "vqpu/net/socket.hpp"

namespace vqpu::net {

/// Observer of every frame a client sends; used to audit wire traffic.
using WireTap = std::function<void(const Endpoint& to, const nlohmann::json& frame)>;
void set_wire_tap(WireTap tap);

/// Request/response session over one lazily opened connection. A failed
/// exchange is retried once on a fresh connection.
class RpcClient {
public:
    explicit RpcClient(Endpoint ep, std::chrono::milliseconds timeout = std::chrono::seconds(30))
        : ep_(std::move(ep)), timeout_(timeout) {}

    const Endpoint& endpoint() const { return ep_; }

    /// Sends one frame and waits for its reply. Throws PeerUnreachable or
    /// TransportError.
    nlohmann::json request(const nlohmann::json& msg);

    /// Like request() but converts {"type":"error"} replies into vqpu::Error.
    nlohmann::json call(const nlohmann::json& msg);

private:
    Endpoint ep_;
    std::chrono::milliseconds timeout_;
    std::mutex mu_;
    Socket sock_;
};

/// Throws the vqpu::Error described by an error frame; no-op otherwise.
void raise_if_error(const nlohmann::json& reply);

}  // namespace vqpu::net
