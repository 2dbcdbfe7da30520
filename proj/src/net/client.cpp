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

#include "vqpu/net/client.hpp"

#include "vqpu/error.hpp"

namespace vqpu::net {

namespace {

std::mutex& tap_mutex() {
    static std::mutex mu;
    return mu;
}

WireTap& tap_slot() {
    static WireTap tap;
    return tap;
}

void notify_tap(const Endpoint& ep, const nlohmann::json& frame) {
    std::lock_guard lock(tap_mutex());
    if (tap_slot()) tap_slot()(ep, frame);
}

}  // namespace

void set_wire_tap(WireTap tap) {
    std::lock_guard lock(tap_mutex());
    tap_slot() = std::move(tap);
}

nlohmann::json RpcClient::request(const nlohmann::json& msg) {
    std::lock_guard lock(mu_);
    notify_tap(ep_, msg);
    for (int attempt = 0;; ++attempt) {
        try {
            if (!sock_.valid()) sock_ = connect_to(ep_);
            send_json(sock_, msg);
            auto reply = recv_json(sock_, timeout_);
            if (!reply) throw Error(ErrorCode::TransportError, "connection closed by " + ep_.str());
            return *reply;
        } catch (const Error& e) {
            sock_.close();
            if (attempt >= 1 || e.code() == ErrorCode::ProtocolError) throw;
        }
    }
}

nlohmann::json RpcClient::call(const nlohmann::json& msg) {
    nlohmann::json reply = request(msg);
    raise_if_error(reply);
    return reply;
}

void raise_if_error(const nlohmann::json& reply) {
    if (reply.is_object() && reply.value("type", "") == "error") {
        throw Error(error_code_from_name(reply.value("code", "Internal")),
                    reply.value("message", std::string("remote error")));
    }
}

}  // namespace vqpu::net
