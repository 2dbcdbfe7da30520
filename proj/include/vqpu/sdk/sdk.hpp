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
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqpu/circuit/backend.hpp"
#include "vqpu/circuit/circuit.hpp"
#include "vqpu/net/client.hpp"
#include "vqpu/orchestrator/registry.hpp"
#include "vqpu/server/protocol.hpp"

namespace vqpu {

/// One vQPU from the registry. Copies share a lazily opened connection.
class QpuHandle {
public:
    explicit QpuHandle(RegistryEntry entry);

    const RegistryEntry& entry() const { return entry_; }
    const std::string& id() const { return entry_.vqpu_id; }
    net::Endpoint endpoint() const { return {entry_.host, entry_.port}; }
    std::string address() const { return entry_.address(); }
    /// The backend file the vQPU was raised with, or the default backend.
    const BackendSpec& backend() const;

    /// Raw request/reply on the shared connection.
    nlohmann::json request(const nlohmann::json& msg) const;

private:
    RegistryEntry entry_;
    std::shared_ptr<net::RpcClient> rpc_;
    mutable std::shared_ptr<BackendSpec> backend_;
};

/// Live vQPUs (executors excluded). With on_node, families raised without
/// --co-located are restricted to the caller's node label. Throws
/// NoQpusAvailable naming the filter.
std::vector<QpuHandle> get_qpus(bool on_node = true,
                                const std::optional<std::string>& family = std::nullopt,
                                const std::filesystem::path& home = registry_home());

enum class JobStatus { Submitted, Running, Done, Failed };
std::string_view job_status_name(JobStatus s);

struct RunOptions {
    std::uint64_t shots = 1024;
    std::optional<std::uint64_t> seed;
    ExecMode mode = ExecMode::Auto;
    std::vector<double> params;
    /// How long a QueueFull rejection is retried before giving up.
    std::chrono::milliseconds queue_retry{10000};
};

/// Asynchronous handle to one submitted task.
class QJob {
public:
    const std::string& job_id() const;
    const QpuHandle& qpu() const;

    /// Nonblocking: polls the server at most once.
    JobStatus state();
    /// Blocks until the job finishes. Throws JobFailed with the server's
    /// diagnostic.
    ResultRecord result();

    /// Rebinds the circuit parameters on the server and tracks the rerun.
    /// Throws InvalidState before completion, or the server's
    /// UnknownJob / NoParamSlots / ArityMismatch.
    QJob upgrade_parameters(const std::vector<double>& params);

private:
    friend QJob submit_job(const QpuHandle&, const std::string&, const nlohmann::json&,
                           std::chrono::milliseconds);
    struct State {
        std::mutex mu;
        std::string job_id;
        std::optional<QpuHandle> qpu;
        JobStatus status = JobStatus::Submitted;
        std::optional<ResultRecord> result;
        std::string failure;
    };
    explicit QJob(std::shared_ptr<State> s) : s_(std::move(s)) {}
    bool poll_locked();

    std::shared_ptr<State> s_;
};

/// Sends a prepared "run" frame and returns once the server acks it.
QJob submit_job(const QpuHandle& qpu, const std::string& job_id, const nlohmann::json& frame,
                std::chrono::milliseconds queue_retry);

/// Throws ValidationFailed or DistributedInstructionPresent.
QJob run(const QpuHandle& qpu, const Circuit& circuit, const RunOptions& options = {});

/// Circuit i runs on qpus[i]. Classical circuits share a plan mapping each
/// circuit id to its vQPU; quantum parts are forwarded to the executor and
/// every job resolves to the same merged result. Throws NotEnoughQpus,
/// DuplicateId, UnknownPeerId, CommModeMismatch, ValidationFailed.
std::vector<QJob> run_distributed(const std::vector<Circuit>& circuits,
                                  const std::vector<QpuHandle>& qpus,
                                  const RunOptions& options = {});

/// Results in input order, after every job has finished. Throws JobFailed
/// for the first failed job.
std::vector<ResultRecord> gather(std::vector<QJob>& jobs);

/// Splits `total` shots over the handles (remainder to the lowest indices,
/// handles left with zero shots get no job). Handle i uses seed stream i.
std::vector<QJob> distribute_shots(const Circuit& circuit, const std::vector<QpuHandle>& qpus,
                                   std::uint64_t total, const RunOptions& options = {});

Counts aggregate_counts(const std::vector<ResultRecord>& records);

/// Unique job identifier.
std::string new_job_id();

}  // namespace vqpu
