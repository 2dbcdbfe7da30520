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
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vqpu/channel/channel.hpp"
#include "vqpu/circuit/backend.hpp"
#include "vqpu/circuit/circuit.hpp"
#include "vqpu/net/frame_server.hpp"
#include "vqpu/net/socket.hpp"
#include "vqpu/server/protocol.hpp"
#include "vqpu/sim/engine.hpp"

namespace vqpu {

enum class ServerRole { Vqpu, Executor };
std::string_view server_role_name(ServerRole r);

struct VqpuConfig {
    ServerRole role = ServerRole::Vqpu;
    std::string family = "default";
    std::size_t index = 0;
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;  // 0 picks a free port
    BackendSpec backend = default_backend();
    CommMode comm_mode = CommMode::None;
    std::optional<std::chrono::milliseconds> ttl;
    std::string simulator = "statevector";
    std::size_t queue_limit = 64;
    /// Executor that quantum-mode vQPUs forward their parts to.
    std::optional<net::Endpoint> executor;
    std::chrono::milliseconds channel_timeout{30000};
    std::chrono::milliseconds part_timeout{60000};
    std::chrono::milliseconds tick_period{50};
    /// After a lifetime drain goes idle, finished results stay pollable
    /// this long before the server stops.
    std::chrono::milliseconds drain_grace{500};
    EngineConfig engine;
};

struct QuantumTask {
    std::string job_id;
    Circuit circuit{1};
    RunConfig config;
};

/// Rejects tasks this vQPU cannot run: backend violations, distributed
/// instructions that do not match the comm mode, parameter arity and an
/// explicit sampled mode on circuits that need the shot loop. Throws
/// ValidationFailed listing every problem.
void admit(const QuantumTask& task, const VqpuConfig& config);

/// Runs a task locally. `channels` must be set for classical distributed
/// circuits. time_taken covers the engine call only.
ResultRecord execute(const QuantumTask& task, const VqpuConfig& config,
                     ChannelEndpoint* channels = nullptr);

/// The vQPU (or executor) process: a receiver thread serving the wire
/// protocol and one simulation worker draining a bounded FIFO queue.
class VqpuServer {
public:
    /// Binds the listening socket. Throws BindFailure.
    explicit VqpuServer(VqpuConfig config);
    ~VqpuServer();
    VqpuServer(const VqpuServer&) = delete;
    VqpuServer& operator=(const VqpuServer&) = delete;

    std::uint16_t port() const { return frames_->port(); }
    std::string address() const;
    const VqpuConfig& config() const { return config_; }

    /// Serves until shutdown or TTL expiry.
    void run();
    /// Thread-safe. Queued tasks fail with JobAborted.
    void stop();
    bool expired() const;

private:
    enum class JobState { Waiting, Queued, Running, Done, Failed };
    enum class TaskKind { Local, Forward, Merged };

    struct Task {
        TaskKind kind = TaskKind::Local;
        QuantumTask task;
        std::vector<Circuit> parts;  // Merged
        std::chrono::steady_clock::time_point enqueued;
    };
    struct Job {
        JobState state = JobState::Queued;
        QuantumTask task;
        std::optional<ResultRecord> result;
        ErrorCode error = ErrorCode::Internal;
        std::string message;
    };
    struct PartGroup {
        std::size_t k = 0;
        std::vector<std::optional<Circuit>> parts;
        std::vector<RunConfig> configs;
        std::chrono::steady_clock::time_point first_seen;
    };

    std::optional<nlohmann::json> handle(const nlohmann::json& msg);
    nlohmann::json on_run(const nlohmann::json& msg);
    nlohmann::json on_part(const nlohmann::json& msg);
    nlohmann::json on_result(const nlohmann::json& msg);
    nlohmann::json on_upgrade(const nlohmann::json& msg);
    nlohmann::json status();
    void on_tick();

    void enqueue_locked(Task t);
    void fail_locked(const std::string& job_id, ErrorCode code, const std::string& message);
    void worker_loop();
    ResultRecord run_task(const Task& t);
    ResultRecord forward(const Task& t);
    ResultRecord run_merged(const Task& t);

    VqpuConfig config_;
    std::unique_ptr<net::FrameServer> frames_;
    std::chrono::steady_clock::time_point started_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Task> queue_;
    std::map<std::string, Job> jobs_;
    std::map<std::string, PartGroup> groups_;
    std::optional<std::string> running_;
    bool stopping_ = false;
    bool draining_ = false;
    std::optional<std::chrono::steady_clock::time_point> idle_since_;

    Mailbox mailbox_;
    std::shared_ptr<TcpTransport> transport_ = std::make_shared<TcpTransport>();
    std::thread worker_;
};

}  // namespace vqpu
