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

#include "vqpu/server/server.hpp"

#include <unistd.h>

#include <random>
#include <set>

#include "vqpu/circuit/wire.hpp"
#include "vqpu/error.hpp"
#include "vqpu/executor/merge.hpp"
#include "vqpu/net/client.hpp"

namespace vqpu {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

std::uint64_t fresh_seed() {
    static std::mutex mu;
    static std::random_device rd;
    std::lock_guard lock(mu);
    return (std::uint64_t{rd()} << 32) ^ rd();
}

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string job_id_of(const json& msg) {
    auto it = msg.find("job_id");
    if (it == msg.end() || !it->is_string()) {
        throw Error(ErrorCode::SchemaViolation, "job_id: missing or not a string");
    }
    return it->get<std::string>();
}

json ack(const std::string& job_id, const std::string& state) {
    return {{"type", "ack"}, {"job_id", job_id}, {"state", state}};
}

}  // namespace

std::string_view server_role_name(ServerRole r) {
    return r == ServerRole::Executor ? "executor" : "vqpu";
}

void admit(const QuantumTask& task, const VqpuConfig& config) {
    const Circuit& c = task.circuit;
    const RunConfig& rc = task.config;
    std::vector<Violation> v = validate(c, config.backend);
    auto add = [&](ErrorCode code, std::string detail) { v.push_back({code, std::move(detail)}); };

    bool classical = false, quantum = false;
    std::set<std::string> peers;
    for (const auto& inst : c.instructions()) {
        classical |= is_classical_comm_name(inst.name);
        quantum |= is_quantum_comm_name(inst.name);
        if (inst.remote) peers.insert(inst.remote->peer);
    }
    const std::string mode(comm_mode_name(config.comm_mode));
    if (quantum && config.comm_mode != CommMode::Quantum) {
        add(ErrorCode::CommModeMismatch, "quantum communication instructions on a " + mode + " vQPU");
    }
    if (classical && config.comm_mode == CommMode::None) {
        add(ErrorCode::CommModeMismatch, "classical communication instructions on a " + mode + " vQPU");
    }
    if ((classical || quantum) && !rc.distributed) {
        add(ErrorCode::InvalidArgument, "distributed instructions without a distributed plan");
    }
    if (rc.distributed && config.comm_mode == CommMode::Classical) {
        const auto& plan = rc.distributed->plan;
        if (!plan.count(c.id())) add(ErrorCode::UnknownPeerId, "plan lacks circuit " + c.id());
        for (const auto& p : peers) {
            if (!plan.count(p)) add(ErrorCode::UnknownPeerId, "plan lacks peer " + p);
        }
    }
    if (rc.distributed && config.comm_mode == CommMode::Quantum) {
        const auto& d = *rc.distributed;
        if (d.k < 2 || d.index >= d.k) {
            add(ErrorCode::InvalidArgument, "part " + std::to_string(d.index) + " of " +
                                                std::to_string(d.k));
        }
        if (!config.executor) add(ErrorCode::InvalidArgument, "no executor configured");
    }
    if (rc.shots == 0) add(ErrorCode::InvalidShots, "shots must be >= 1");
    const auto slots = c.param_slots();
    if (rc.params.size() != slots.size()) {
        add(slots.empty() && !rc.params.empty() ? ErrorCode::ArityMismatch
            : rc.params.empty()                ? ErrorCode::UnboundParameter
                                               : ErrorCode::ArityMismatch,
            std::to_string(rc.params.size()) + " values for " + std::to_string(slots.size()) +
                " parameter slots");
    }
    if (rc.mode == ExecMode::Sampled && !is_sampling_admissible(c)) {
        add(ErrorCode::InvalidArgument, "sampled mode needs terminal measurements only");
    }
    if (!v.empty()) throw Error(ErrorCode::ValidationFailed, describe(v));
}

ResultRecord execute(const QuantumTask& task, const VqpuConfig& config, ChannelEndpoint* channels) {
    const RunConfig& rc = task.config;
    if (rc.shots == 0) throw Error(ErrorCode::InvalidShots, "shots must be >= 1");
    const Circuit circuit =
        task.circuit.param_slots().empty() ? task.circuit : bind_parameters(task.circuit, rc.params);
    ExecMode mode = rc.mode;
    if (mode == ExecMode::Auto) {
        mode = is_sampling_admissible(circuit) ? ExecMode::Sampled : ExecMode::ShotLoop;
    }
    const std::uint64_t seed = rc.seed ? *rc.seed : fresh_seed();

    ChannelHooks hooks;
    if (channels) {
        hooks.send = [channels](const std::string& peer, std::uint64_t shot, std::uint64_t seq,
                                int bit) { channels->send_bit(peer, shot, seq, bit); };
        hooks.recv = [channels](const std::string& peer, std::uint64_t shot, std::uint64_t seq) {
            return channels->recv_bit(peer, shot, seq);
        };
    }

    ResultRecord r;
    r.job_id = task.job_id;
    const auto start = Clock::now();
    try {
        r.counts = mode == ExecMode::Sampled
                       ? run_sampled(circuit, rc.shots, seed, config.engine)
                       : run_shot_loop(circuit, rc.shots, seed, hooks, config.engine);
    } catch (const Error& e) {
        throw Error(e.code(), "job " + task.job_id + ": " + e.detail());
    }
    r.time_taken = seconds_since(start);
    r.metadata = {{"seed", seed},
                  {"engine", config.simulator},
                  {"shots", rc.shots},
                  {"mode", exec_mode_name(mode)}};
    if (channels) {
        r.metadata["bits_sent"] = channels->bits_sent();
        r.metadata["bits_received"] = channels->bits_received();
    }
    return r;
}

VqpuServer::VqpuServer(VqpuConfig config) : config_(std::move(config)), started_(Clock::now()) {
    frames_ = std::make_unique<net::FrameServer>(
        net::Listener::bind(config_.host, config_.port),
        [this](const json& msg) { return handle(msg); }, [this] { on_tick(); },
        config_.tick_period);
}

VqpuServer::~VqpuServer() {
    stop();
    if (worker_.joinable()) worker_.join();
}

std::string VqpuServer::address() const { return config_.host + ":" + std::to_string(port()); }

void VqpuServer::run() {
    worker_ = std::thread([this] { worker_loop(); });
    frames_->run();
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    cv_.notify_all();
}

void VqpuServer::stop() {
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
        for (const auto& t : queue_) {
            fail_locked(t.task.job_id, ErrorCode::JobAborted, "server shut down");
        }
        queue_.clear();
        if (running_) {
            auto it = jobs_.find(*running_);
            if (it != jobs_.end() && it->second.task.config.distributed) {
                mailbox_.abort(it->second.task.config.distributed->group);
            }
        }
    }
    cv_.notify_all();
    frames_->stop();
}

bool VqpuServer::expired() const {
    std::lock_guard lock(mu_);
    return draining_;
}

std::optional<json> VqpuServer::handle(const json& msg) {
    if (route_channel_frame(mailbox_, msg)) return std::nullopt;
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
        throw Error(ErrorCode::ProtocolError, "message without a type");
    }
    const std::string type = msg["type"].get<std::string>();
    if (type == "status") return status();
    if (type == "run") return on_run(msg);
    if (type == "part") return on_part(msg);
    if (type == "result") return on_result(msg);
    if (type == "upgrade_parameters") return on_upgrade(msg);
    if (type == "shutdown") {
        stop();
        return json{{"type", "ack"}, {"state", "stopping"}};
    }
    throw Error(ErrorCode::ProtocolError, "unknown message type " + type);
}

json VqpuServer::status() {
    std::lock_guard lock(mu_);
    return {{"type", "status"},
            {"role", server_role_name(config_.role)},
            {"state", running_ ? "busy" : "idle"},
            {"queued", queue_.size()},
            {"family", config_.family},
            {"index", config_.index},
            {"comm_mode", comm_mode_name(config_.comm_mode)},
            {"backend", config_.backend.name},
            {"n_qubits", config_.backend.n_qubits},
            {"simulator", config_.simulator},
            {"port", port()},
            {"pid", ::getpid()},
            {"jobs", jobs_.size()},
            {"waiting_groups", groups_.size()},
            {"draining", draining_}};
}

json VqpuServer::on_run(const json& msg) {
    if (config_.role == ServerRole::Executor) {
        throw Error(ErrorCode::NotSupported, "the executor accepts parts, not runs");
    }
    QuantumTask task;
    task.job_id = job_id_of(msg);
    if (!msg.contains("circuit")) throw Error(ErrorCode::SchemaViolation, "circuit: missing");
    task.circuit = circuit_from_json(msg["circuit"]);
    task.config = run_config_from_json(msg.value("config", json::object()));
    {
        std::lock_guard lock(mu_);
        if (draining_) throw Error(ErrorCode::Expired, "vQPU lifetime expired");
        if (jobs_.count(task.job_id)) return ack(task.job_id, "queued");
    }
    admit(task, config_);

    Task t;
    t.kind = config_.comm_mode == CommMode::Quantum && task.config.distributed ? TaskKind::Forward
                                                                                : TaskKind::Local;
    t.task = task;
    std::lock_guard lock(mu_);
    if (jobs_.count(task.job_id)) return ack(task.job_id, "queued");
    try {
        enqueue_locked(std::move(t));
    } catch (const Error& e) {
        json reply = net::error_reply(e.code(), e.detail());
        reply["retriable"] = true;
        reply["job_id"] = task.job_id;
        return reply;
    }
    Job job;
    job.task = std::move(task);
    const std::string id = job.task.job_id;
    jobs_[id] = std::move(job);
    return ack(id, "queued");
}

json VqpuServer::on_part(const json& msg) {
    if (config_.role != ServerRole::Executor) {
        throw Error(ErrorCode::NotSupported, "parts go to the executor");
    }
    const std::string group = job_id_of(msg);
    const std::size_t k = msg.at("k").get<std::size_t>();
    const std::size_t index = msg.at("index").get<std::size_t>();
    Circuit circuit = circuit_from_json(msg.at("circuit"));
    const RunConfig rc = run_config_from_json(msg.value("config", json::object()));
    if (k < 2 || index >= k) {
        throw Error(ErrorCode::InvalidArgument,
                    "part " + std::to_string(index) + " of " + std::to_string(k));
    }
    if (auto v = validate(circuit, config_.backend); !v.empty()) {
        throw Error(ErrorCode::ValidationFailed, describe(v));
    }

    std::lock_guard lock(mu_);
    if (draining_) throw Error(ErrorCode::Expired, "executor lifetime expired");
    if (jobs_.count(group)) return ack(group, "queued");
    PartGroup& g = groups_[group];
    if (g.k == 0) {
        g.k = k;
        g.parts.resize(k);
        g.configs.resize(k);
        g.first_seen = Clock::now();
    }
    if (g.k != k) {
        throw Error(ErrorCode::InvalidArgument, "group " + group + " has " + std::to_string(g.k) +
                                                    " parts, got k=" + std::to_string(k));
    }
    g.parts[index] = std::move(circuit);
    g.configs[index] = rc;
    for (const auto& p : g.parts) {
        if (!p) return ack(group, "waiting");
    }

    Job job;
    job.task.job_id = group;
    job.task.config = g.configs[0];
    Task t;
    t.kind = TaskKind::Merged;
    t.task = job.task;
    for (auto& p : g.parts) t.parts.push_back(std::move(*p));
    std::optional<std::string> conflict;
    for (std::size_t i = 1; i < k; ++i) {
        if (g.configs[i].shots != g.configs[0].shots) {
            conflict = "part " + std::to_string(i) + " asks for " +
                       std::to_string(g.configs[i].shots) + " shots, part 0 for " +
                       std::to_string(g.configs[0].shots);
        }
    }
    groups_.erase(group);
    jobs_[group] = std::move(job);
    if (conflict) {
        fail_locked(group, ErrorCode::InvalidArgument, *conflict);
        return ack(group, "failed");
    }
    try {
        enqueue_locked(std::move(t));
    } catch (const Error& e) {
        fail_locked(group, e.code(), e.detail());
        return ack(group, "failed");
    }
    return ack(group, "queued");
}

json VqpuServer::on_result(const json& msg) {
    const std::string id = job_id_of(msg);
    std::lock_guard lock(mu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) {
        if (groups_.count(id)) return ack(id, "waiting");
        throw Error(ErrorCode::UnknownJob, "no job " + id);
    }
    const Job& job = it->second;
    switch (job.state) {
        case JobState::Done: return result_to_json(*job.result);
        case JobState::Failed: {
            json reply = net::error_reply(job.error, job.message);
            reply["job_id"] = id;
            return reply;
        }
        case JobState::Running: return ack(id, "running");
        default: return ack(id, "queued");
    }
}

json VqpuServer::on_upgrade(const json& msg) {
    const std::string id = job_id_of(msg);
    if (!msg.contains("params") || !msg["params"].is_array()) {
        throw Error(ErrorCode::SchemaViolation, "params: missing or not an array");
    }
    std::vector<double> params;
    for (const auto& p : msg["params"]) {
        if (!p.is_number()) throw Error(ErrorCode::SchemaViolation, "params: not a number");
        params.push_back(p.get<double>());
    }

    std::lock_guard lock(mu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(ErrorCode::UnknownJob, "no job " + id);
    Job& job = it->second;
    if (job.state != JobState::Done) {
        throw Error(ErrorCode::InvalidState, "job " + id + " has not completed");
    }
    const auto slots = job.task.circuit.param_slots();
    if (slots.empty()) throw Error(ErrorCode::NoParamSlots, "job " + id + " has no parameters");
    if (params.size() != slots.size()) {
        throw Error(ErrorCode::ArityMismatch, std::to_string(params.size()) + " values for " +
                                                  std::to_string(slots.size()) + " slots");
    }
    if (job.task.config.distributed) {
        throw Error(ErrorCode::NotSupported, "parameter upgrades of distributed jobs");
    }
    Task t;
    t.task = job.task;
    t.task.config.params = params;
    enqueue_locked(t);
    job.task = t.task;
    job.state = JobState::Queued;
    job.result.reset();
    return ack(id, "queued");
}

void VqpuServer::on_tick() {
    bool stop_now = false;
    {
        std::lock_guard lock(mu_);
        const auto now = Clock::now();
        for (auto it = groups_.begin(); it != groups_.end();) {
            if (now - it->second.first_seen < config_.part_timeout) {
                ++it;
                continue;
            }
            std::size_t have = 0;
            for (const auto& p : it->second.parts) have += p.has_value();
            Job job;
            job.task.job_id = it->first;
            jobs_[it->first] = std::move(job);
            fail_locked(it->first, ErrorCode::JobAborted,
                        "received " + std::to_string(have) + " of " +
                            std::to_string(it->second.k) + " parts before the timeout");
            it = groups_.erase(it);
        }
        if (config_.ttl && !draining_ && now - started_ >= *config_.ttl) {
            draining_ = true;
            for (const auto& t : queue_) {
                fail_locked(t.task.job_id, ErrorCode::Expired, "vQPU lifetime expired");
            }
            queue_.clear();
        }
        if (draining_ && !running_ && queue_.empty() && !stopping_) {
            if (!idle_since_) idle_since_ = now;
            if (now - *idle_since_ >= config_.drain_grace) {
                stopping_ = true;
                stop_now = true;
            }
        }
    }
    if (stop_now) {
        cv_.notify_all();
        frames_->stop();
    }
}

void VqpuServer::enqueue_locked(Task t) {
    if (queue_.size() >= config_.queue_limit) {
        throw Error(ErrorCode::QueueFull, "queue holds " + std::to_string(queue_.size()) +
                                              " tasks; retry later");
    }
    t.enqueued = Clock::now();
    queue_.push_back(std::move(t));
    cv_.notify_all();
}

void VqpuServer::fail_locked(const std::string& job_id, ErrorCode code, const std::string& message) {
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) return;
    it->second.state = JobState::Failed;
    it->second.error = code;
    it->second.message = message;
    it->second.result.reset();
}

void VqpuServer::worker_loop() {
    for (;;) {
        Task t;
        {
            std::unique_lock lock(mu_);
            cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
            if (stopping_) return;
            t = std::move(queue_.front());
            queue_.pop_front();
            running_ = t.task.job_id;
            jobs_[t.task.job_id].state = JobState::Running;
        }
        const double queue_wait = seconds_since(t.enqueued);
        std::optional<ResultRecord> result;
        ErrorCode code = ErrorCode::Internal;
        std::string message;
        try {
            result = run_task(t);
            result->job_id = t.task.job_id;
            result->metadata["queue_wait"] = queue_wait;
            result->metadata["vqpu"] = config_.family + "/" + std::to_string(config_.index);
        } catch (const Error& e) {
            code = e.code();
            message = e.detail();
        } catch (const std::exception& e) {
            message = e.what();
        }
        {
            std::lock_guard lock(mu_);
            running_.reset();
            Job& job = jobs_[t.task.job_id];
            if (result) {
                job.state = JobState::Done;
                job.result = std::move(result);
            } else {
                job.state = JobState::Failed;
                job.error = code;
                job.message = message;
            }
        }
    }
}

ResultRecord VqpuServer::run_task(const Task& t) {
    if (t.kind == TaskKind::Merged) return run_merged(t);
    if (t.kind == TaskKind::Forward) return forward(t);
    const auto& dist = t.task.config.distributed;
    if (!dist || config_.comm_mode != CommMode::Classical) return execute(t.task, config_);

    ChannelOptions opts;
    opts.recv_timeout = config_.channel_timeout;
    ChannelEndpoint ep(dist->group, t.task.circuit.id(), dist->plan, transport_, mailbox_, opts);
    try {
        ResultRecord r = execute(t.task, config_, &ep);
        mailbox_.purge(dist->group);
        return r;
    } catch (...) {
        ep.abort();
        mailbox_.purge(dist->group);
        throw;
    }
}

ResultRecord VqpuServer::forward(const Task& t) {
    const auto& dist = *t.task.config.distributed;
    const Circuit bound = t.task.circuit.param_slots().empty()
                              ? t.task.circuit
                              : bind_parameters(t.task.circuit, t.task.config.params);
    RunConfig rc = t.task.config;
    rc.params.clear();
    net::RpcClient exec(*config_.executor);
    exec.call({{"type", "part"},
               {"job_id", dist.group},
               {"k", dist.k},
               {"index", dist.index},
               {"circuit", circuit_to_json(bound)},
               {"config", run_config_to_json(rc)}});
    for (;;) {
        {
            std::lock_guard lock(mu_);
            if (stopping_) throw Error(ErrorCode::JobAborted, "server shut down");
        }
        const json reply = exec.request({{"type", "result"}, {"job_id", dist.group}});
        net::raise_if_error(reply);
        if (reply.value("type", "") == "result") {
            ResultRecord r = result_from_json(reply);
            r.metadata["executor"] = config_.executor->str();
            return r;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

ResultRecord VqpuServer::run_merged(const Task& t) {
    const MergedCircuit merged = build_merged(merge_circuits(t.parts));
    const RunConfig& rc = t.task.config;
    ResultRecord r = execute_merged(merged, rc.shots, rc.seed ? *rc.seed : fresh_seed(), config_.engine);
    r.metadata["engine"] = config_.simulator;
    r.metadata["parts"] = t.parts.size();
    return r;
}

}  // namespace vqpu
