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
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include <json.hpp>

#include "vqpu/net/socket.hpp"

namespace vqpu {

struct BitMessage {
    std::string job;  // distributed job the message belongs to
    std::string src;
    std::string dst;
    std::uint64_t epoch = 0;
    std::uint64_t seq = 0;
    int bit = 0;

    friend bool operator==(const BitMessage&, const BitMessage&) = default;
};

nlohmann::json bit_message_to_json(const BitMessage& m);
/// Throws SchemaViolation.
BitMessage bit_message_from_json(const nlohmann::json& j);
bool is_bit_message(const nlohmann::json& j);

/// Receipt acknowledging that `dst` has started consuming epoch `epoch`
/// from `src`.
struct BitAck {
    std::string job;
    std::string src;
    std::string dst;
    std::uint64_t epoch = 0;
};

nlohmann::json bit_ack_to_json(const BitAck& a);
BitAck bit_ack_from_json(const nlohmann::json& j);

/// Per-process inbox of bit messages and acks, keyed by (job, src, dst).
/// Fed by the transport reader, drained by simulation threads.
class Mailbox {
public:
    void push(BitMessage msg);
    void push_ack(const BitAck& ack);

    /// Blocks until the next message on (job, src, dst) arrives. It must
    /// carry (epoch, seq): a different epoch is EpochMismatch, a different
    /// seq ProtocolError. Timeout is ChannelTimeout; abort is JobAborted.
    int pop(const std::string& job, const std::string& src, const std::string& dst,
            std::uint64_t epoch, std::uint64_t seq, std::chrono::milliseconds timeout);

    /// Blocks until dst acked at least `epoch` of messages from src.
    void wait_ack(const std::string& job, const std::string& src, const std::string& dst,
                  std::uint64_t epoch, std::chrono::milliseconds timeout);

    /// Wakes and fails every waiter of the job; later calls also fail.
    void abort(const std::string& job);
    bool aborted(const std::string& job) const;

    /// Drops all state of a finished job.
    void purge(const std::string& job);

    std::size_t pending(const std::string& job) const;

private:
    using Key = std::tuple<std::string, std::string, std::string>;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::map<Key, std::deque<BitMessage>> queues_;
    std::map<Key, std::uint64_t> acked_;  // highest acked epoch + 1
    std::map<std::string, bool> aborted_;
};

/// Delivery of channel frames to a peer process.
class ChannelTransport {
public:
    virtual ~ChannelTransport() = default;
    /// Reliable, ordered per destination. Throws PeerUnreachable.
    virtual void deliver(const std::string& address, const nlohmann::json& frame) = 0;
};

/// Lazily opened, cached TCP connections; one per destination address.
class TcpTransport : public ChannelTransport {
public:
    void deliver(const std::string& address, const nlohmann::json& frame) override;

private:
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<std::pair<std::mutex, net::Socket>>> conns_;
};

/// In-process delivery straight into registered mailboxes.
class LoopbackTransport : public ChannelTransport {
public:
    void attach(const std::string& address, Mailbox* box);
    void deliver(const std::string& address, const nlohmann::json& frame) override;

private:
    std::mutex mu_;
    std::map<std::string, Mailbox*> boxes_;
};

/// Routes an inbound channel frame (bit message or ack) into a mailbox.
/// Returns false when the frame is not a channel frame.
bool route_channel_frame(Mailbox& box, const nlohmann::json& frame);

struct ChannelOptions {
    std::chrono::milliseconds recv_timeout{30000};
    /// Senders may lead their receivers by at most this many shot epochs.
    std::uint64_t max_lead = 1;
};

/// One participant's view of the channel fabric for one distributed job.
class ChannelEndpoint {
public:
    ChannelEndpoint(std::string job, std::string local, std::map<std::string, std::string> peer_map,
                    std::shared_ptr<ChannelTransport> transport, Mailbox& mailbox,
                    ChannelOptions options = {});

    const std::string& local() const { return local_; }
    const std::map<std::string, std::string>& peer_map() const { return peers_; }

    /// Throws PeerUnreachable, JobAborted, ChannelTimeout (lockstep wait).
    void send_bit(const BitMessage& msg);
    void send_bit(const std::string& to, std::uint64_t epoch, std::uint64_t seq, int bit);
    /// Throws ChannelTimeout, EpochMismatch, JobAborted.
    int recv_bit(const std::string& from, std::uint64_t epoch, std::uint64_t seq);

    void abort();

    std::uint64_t bits_sent() const { return sent_; }
    std::uint64_t bits_received() const { return received_; }

private:
    const std::string& address_of(const std::string& peer) const;

    std::string job_;
    std::string local_;
    std::map<std::string, std::string> peers_;
    std::shared_ptr<ChannelTransport> transport_;
    Mailbox& mailbox_;
    ChannelOptions options_;
    std::map<std::string, std::uint64_t> send_epoch_;  // peer -> next epoch needing a gate
    std::map<std::string, std::uint64_t> acked_to_;    // peer -> next epoch to acknowledge
    std::atomic<std::uint64_t> sent_{0};
    std::atomic<std::uint64_t> received_{0};
};

/// One endpoint per plan participant, all sharing a transport and mailbox.
std::map<std::string, std::unique_ptr<ChannelEndpoint>> establish(
    const std::string& job, const std::map<std::string, std::string>& job_plan,
    std::shared_ptr<ChannelTransport> transport, Mailbox& mailbox, ChannelOptions options = {});

}  // namespace vqpu
