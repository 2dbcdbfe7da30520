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

#include "vqpu/channel/channel.hpp"

#include "vqpu/error.hpp"

namespace vqpu {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field) {
    throw Error(ErrorCode::SchemaViolation, field + ": bad or missing");
}

std::string str_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) bad(key);
    return j[key].get<std::string>();
}

std::uint64_t uint_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 0) bad(key);
    return j[key].get<std::uint64_t>();
}

}  // namespace

json bit_message_to_json(const BitMessage& m) {
    return json{{"src", m.src}, {"dst", m.dst}, {"epoch", m.epoch},
                {"seq", m.seq}, {"bit", m.bit}, {"job", m.job}};
}

BitMessage bit_message_from_json(const json& j) {
    if (!j.is_object()) bad("$");
    BitMessage m;
    m.src = str_field(j, "src");
    m.dst = str_field(j, "dst");
    m.epoch = uint_field(j, "epoch");
    m.seq = uint_field(j, "seq");
    const std::uint64_t bit = uint_field(j, "bit");
    if (bit > 1) bad("bit");
    m.bit = static_cast<int>(bit);
    m.job = j.contains("job") ? str_field(j, "job") : std::string();
    return m;
}

bool is_bit_message(const json& j) {
    return j.is_object() && !j.contains("type") && j.contains("bit") && j.contains("src");
}

json bit_ack_to_json(const BitAck& a) {
    return json{{"type", "bit_ack"}, {"job", a.job}, {"src", a.src}, {"dst", a.dst}, {"epoch", a.epoch}};
}

BitAck bit_ack_from_json(const json& j) {
    BitAck a;
    a.job = str_field(j, "job");
    a.src = str_field(j, "src");
    a.dst = str_field(j, "dst");
    a.epoch = uint_field(j, "epoch");
    return a;
}

void Mailbox::push(BitMessage msg) {
    {
        std::lock_guard lock(mu_);
        Key key{msg.job, msg.src, msg.dst};
        queues_[key].push_back(std::move(msg));
    }
    cv_.notify_all();
}

void Mailbox::push_ack(const BitAck& ack) {
    {
        std::lock_guard lock(mu_);
        auto& v = acked_[Key{ack.job, ack.src, ack.dst}];
        v = std::max(v, ack.epoch + 1);
    }
    cv_.notify_all();
}

int Mailbox::pop(const std::string& job, const std::string& src, const std::string& dst,
                 std::uint64_t epoch, std::uint64_t seq, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    const Key key{job, src, dst};
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        if (aborted_.count(job)) throw Error(ErrorCode::JobAborted, "job " + job + " aborted");
        auto it = queues_.find(key);
        if (it != queues_.end() && !it->second.empty()) {
            const BitMessage m = it->second.front();
            if (m.epoch != epoch) {
                throw Error(ErrorCode::EpochMismatch,
                            "from " + src + ": expected shot epoch " + std::to_string(epoch) +
                                ", got " + std::to_string(m.epoch));
            }
            if (m.seq != seq) {
                throw Error(ErrorCode::ProtocolError,
                            "from " + src + ": expected seq " + std::to_string(seq) + ", got " +
                                std::to_string(m.seq));
            }
            it->second.pop_front();
            return m.bit;
        }
        if (cv_.wait_until(lock, deadline) == std::cv_status::timeout &&
            std::chrono::steady_clock::now() >= deadline) {
            auto again = queues_.find(key);
            if (again == queues_.end() || again->second.empty()) {
                throw Error(ErrorCode::ChannelTimeout,
                            "no bit from " + src + " (epoch " + std::to_string(epoch) + ", seq " +
                                std::to_string(seq) + ") within " +
                                std::to_string(timeout.count()) + " ms");
            }
        }
    }
}

void Mailbox::wait_ack(const std::string& job, const std::string& src, const std::string& dst,
                       std::uint64_t epoch, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    const Key key{job, src, dst};
    const bool ok = cv_.wait_for(lock, timeout, [&] {
        if (aborted_.count(job)) return true;
        auto it = acked_.find(key);
        return it != acked_.end() && it->second > epoch;
    });
    if (aborted_.count(job)) throw Error(ErrorCode::JobAborted, "job " + job + " aborted");
    if (!ok) {
        throw Error(ErrorCode::ChannelTimeout, dst + " never reached shot epoch " +
                                                   std::to_string(epoch) + " (lockstep wait)");
    }
}

void Mailbox::abort(const std::string& job) {
    {
        std::lock_guard lock(mu_);
        aborted_[job] = true;
    }
    cv_.notify_all();
}

bool Mailbox::aborted(const std::string& job) const {
    std::lock_guard lock(mu_);
    return aborted_.count(job) > 0;
}

void Mailbox::purge(const std::string& job) {
    std::lock_guard lock(mu_);
    std::erase_if(queues_, [&](const auto& kv) { return std::get<0>(kv.first) == job; });
    std::erase_if(acked_, [&](const auto& kv) { return std::get<0>(kv.first) == job; });
}

std::size_t Mailbox::pending(const std::string& job) const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& [k, q] : queues_)
        if (std::get<0>(k) == job) n += q.size();
    return n;
}

void TcpTransport::deliver(const std::string& address, const json& frame) {
    std::shared_ptr<std::pair<std::mutex, net::Socket>> conn;
    {
        std::lock_guard lock(mu_);
        auto& slot = conns_[address];
        if (!slot) slot = std::make_shared<std::pair<std::mutex, net::Socket>>();
        conn = slot;
    }
    std::lock_guard lock(conn->first);
    for (int attempt = 0;; ++attempt) {
        try {
            if (!conn->second.valid()) {
                conn->second = net::connect_to(net::Endpoint::parse(address));
            }
            net::send_json(conn->second, frame);
            return;
        } catch (const Error& e) {
            conn->second.close();
            if (attempt >= 1) throw Error(ErrorCode::PeerUnreachable, address + ": " + e.detail());
        }
    }
}

void LoopbackTransport::attach(const std::string& address, Mailbox* box) {
    std::lock_guard lock(mu_);
    boxes_[address] = box;
}

void LoopbackTransport::deliver(const std::string& address, const json& frame) {
    Mailbox* box = nullptr;
    {
        std::lock_guard lock(mu_);
        auto it = boxes_.find(address);
        if (it == boxes_.end()) throw Error(ErrorCode::PeerUnreachable, "no mailbox at " + address);
        box = it->second;
    }
    route_channel_frame(*box, frame);
}

bool route_channel_frame(Mailbox& box, const json& frame) {
    if (is_bit_message(frame)) {
        box.push(bit_message_from_json(frame));
        return true;
    }
    if (frame.is_object() && frame.value("type", "") == "bit_ack") {
        box.push_ack(bit_ack_from_json(frame));
        return true;
    }
    return false;
}

ChannelEndpoint::ChannelEndpoint(std::string job, std::string local,
                                 std::map<std::string, std::string> peer_map,
                                 std::shared_ptr<ChannelTransport> transport, Mailbox& mailbox,
                                 ChannelOptions options)
    : job_(std::move(job)),
      local_(std::move(local)),
      peers_(std::move(peer_map)),
      transport_(std::move(transport)),
      mailbox_(mailbox),
      options_(options) {}

const std::string& ChannelEndpoint::address_of(const std::string& peer) const {
    auto it = peers_.find(peer);
    if (it == peers_.end()) {
        throw Error(ErrorCode::PeerUnreachable, "peer '" + peer + "' is not in the job plan");
    }
    return it->second;
}

void ChannelEndpoint::send_bit(const BitMessage& msg) {
    if (msg.src != local_) {
        throw Error(ErrorCode::InvalidArgument, "message source " + msg.src + " is not " + local_);
    }
    if (mailbox_.aborted(job_)) throw Error(ErrorCode::JobAborted, "job " + job_ + " aborted");
    const std::string& address = address_of(msg.dst);
    auto& gated = send_epoch_[msg.dst];
    if (msg.epoch >= gated) {
        if (msg.epoch >= options_.max_lead) {
            mailbox_.wait_ack(job_, local_, msg.dst, msg.epoch - options_.max_lead,
                              options_.recv_timeout);
        }
        gated = msg.epoch + 1;
    }
    BitMessage out = msg;
    out.job = job_;
    transport_->deliver(address, bit_message_to_json(out));
    ++sent_;
}

void ChannelEndpoint::send_bit(const std::string& to, std::uint64_t epoch, std::uint64_t seq, int bit) {
    send_bit(BitMessage{job_, local_, to, epoch, seq, bit});
}

int ChannelEndpoint::recv_bit(const std::string& from, std::uint64_t epoch, std::uint64_t seq) {
    const int bit = mailbox_.pop(job_, from, local_, epoch, seq, options_.recv_timeout);
    ++received_;
    auto& next = acked_to_[from];
    if (epoch >= next) {
        next = epoch + 1;
        try {
            transport_->deliver(address_of(from), bit_ack_to_json({job_, from, local_, epoch}));
        } catch (const Error&) {
            // A sender that already finished no longer needs the ack.
        }
    }
    return bit;
}

void ChannelEndpoint::abort() { mailbox_.abort(job_); }

std::map<std::string, std::unique_ptr<ChannelEndpoint>> establish(
    const std::string& job, const std::map<std::string, std::string>& job_plan,
    std::shared_ptr<ChannelTransport> transport, Mailbox& mailbox, ChannelOptions options) {
    std::map<std::string, std::unique_ptr<ChannelEndpoint>> out;
    for (const auto& [id, address] : job_plan) {
        out[id] = std::make_unique<ChannelEndpoint>(job, id, job_plan, transport, mailbox, options);
    }
    return out;
}

}  // namespace vqpu
