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

#include "vqpu/sdk/sdk.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "vqpu/circuit/wire.hpp"
#include "vqpu/error.hpp"
#include "vqpu/sim/rng.hpp"

namespace vqpu {

using nlohmann::json;
using namespace std::chrono_literals;

QpuHandle::QpuHandle(RegistryEntry entry)
    : entry_(std::move(entry)), rpc_(std::make_shared<net::RpcClient>(endpoint())) {}

const BackendSpec& QpuHandle::backend() const {
    if (!backend_) {
        backend_ = std::make_shared<BackendSpec>(
            entry_.backend_path.empty() ? default_backend() : load_backend_file(entry_.backend_path));
    }
    return *backend_;
}

json QpuHandle::request(const json& msg) const { return rpc_->request(msg); }

std::vector<QpuHandle> get_qpus(bool on_node, const std::optional<std::string>& family,
                                const std::filesystem::path& home) {
    const std::string node = current_node();
    std::vector<QpuHandle> out;
    for (auto& e : Registry(home).load()) {
        if (e.kind != "vqpu" || !process_alive(e.pid)) continue;
        if (family && e.family != *family) continue;
        if (on_node && !e.co_located && e.node != node) continue;
        out.emplace_back(std::move(e));
    }
    if (out.empty()) {
        std::string filter = "on_node=" + std::string(on_node ? "true" : "false") + " node=" + node;
        if (family) filter += " family=" + *family;
        throw Error(ErrorCode::NoQpusAvailable, "no live vQPUs match " + filter);
    }
    return out;
}

std::string_view job_status_name(JobStatus s) {
    switch (s) {
        case JobStatus::Submitted: return "submitted";
        case JobStatus::Running: return "running";
        case JobStatus::Done: return "done";
        case JobStatus::Failed: return "failed";
    }
    return "failed";
}

std::string new_job_id() {
    static std::atomic<std::uint64_t> counter{0};
    static const std::uint64_t salt = [] {
        std::random_device rd;
        return (std::uint64_t{rd()} << 32) ^ rd();
    }();
    std::ostringstream out;
    out << "job-" << std::hex << salt << "-" << counter.fetch_add(1);
    return out.str();
}

const std::string& QJob::job_id() const { return s_->job_id; }

const QpuHandle& QJob::qpu() const { return *s_->qpu; }

bool QJob::poll_locked() {
    if (s_->status == JobStatus::Done || s_->status == JobStatus::Failed) return true;
    json reply;
    try {
        reply = s_->qpu->request({{"type", "result"}, {"job_id", s_->job_id}});
    } catch (const Error& e) {
        s_->status = JobStatus::Failed;
        s_->failure = e.what();
        return true;
    }
    const std::string type = reply.value("type", "");
    if (type == "result") {
        s_->result = result_from_json(reply);
        s_->status = JobStatus::Done;
        return true;
    }
    if (type == "error") {
        s_->status = JobStatus::Failed;
        s_->failure = reply.value("code", "Internal") + ": " + reply.value("message", "");
        return true;
    }
    if (reply.value("state", "") == "running") s_->status = JobStatus::Running;
    return false;
}

JobStatus QJob::state() {
    std::lock_guard lock(s_->mu);
    poll_locked();
    return s_->status;
}

ResultRecord QJob::result() {
    std::lock_guard lock(s_->mu);
    auto delay = 1ms;
    while (!poll_locked()) {
        std::this_thread::sleep_for(delay);
        delay = std::min(delay * 2, std::chrono::milliseconds(50));
    }
    if (s_->status == JobStatus::Failed) {
        throw Error(ErrorCode::JobFailed, s_->job_id + ": " + s_->failure);
    }
    return *s_->result;
}

QJob QJob::upgrade_parameters(const std::vector<double>& params) {
    std::lock_guard lock(s_->mu);
    poll_locked();
    if (s_->status != JobStatus::Done) {
        throw Error(ErrorCode::InvalidState, "job " + s_->job_id + " is " +
                                                 std::string(job_status_name(s_->status)));
    }
    net::raise_if_error(s_->qpu->request(
        {{"type", "upgrade_parameters"}, {"job_id", s_->job_id}, {"params", params}}));
    auto next = std::make_shared<State>();
    next->job_id = s_->job_id;
    next->qpu = s_->qpu;
    return QJob(next);
}

QJob submit_job(const QpuHandle& qpu, const std::string& job_id, const json& frame,
                std::chrono::milliseconds queue_retry) {
    auto s = std::make_shared<QJob::State>();
    s->job_id = job_id;
    s->qpu = qpu;
    const auto deadline = std::chrono::steady_clock::now() + queue_retry;
    auto delay = 5ms;
    for (;;) {
        json reply;
        try {
            reply = qpu.request(frame);
        } catch (const Error& e) {
            // Transport failures surface when the result is requested.
            s->status = JobStatus::Failed;
            s->failure = e.what();
            return QJob(s);
        }
        if (reply.value("type", "") == "error" && reply.value("code", "") == "QueueFull" &&
            std::chrono::steady_clock::now() < deadline) {
            std::this_thread::sleep_for(delay);
            delay = std::min(delay * 2, std::chrono::milliseconds(200));
            continue;
        }
        net::raise_if_error(reply);
        return QJob(s);
    }
}

namespace {

void check_valid(const Circuit& c, const QpuHandle& qpu) {
    const auto v = validate(c, qpu.backend());
    if (!v.empty()) throw Error(ErrorCode::ValidationFailed, c.id() + ": " + describe(v));
}

json run_frame(const std::string& job_id, const Circuit& c, const RunConfig& rc) {
    return {{"type", "run"}, {"job_id", job_id}, {"circuit", circuit_to_json(c)},
            {"config", run_config_to_json(rc)}};
}

RunConfig base_config(const RunOptions& o) {
    RunConfig rc;
    rc.shots = o.shots;
    rc.seed = o.seed;
    rc.mode = o.mode;
    rc.params = o.params;
    return rc;
}

}  // namespace

QJob run(const QpuHandle& qpu, const Circuit& circuit, const RunOptions& options) {
    for (const auto& inst : circuit.instructions()) {
        if (is_distributed_name(inst.name)) {
            throw Error(ErrorCode::DistributedInstructionPresent,
                        circuit.id() + " holds " + inst.name + "; use run_distributed");
        }
    }
    check_valid(circuit, qpu);
    const std::string id = new_job_id();
    return submit_job(qpu, id, run_frame(id, circuit, base_config(options)), options.queue_retry);
}

std::vector<QJob> run_distributed(const std::vector<Circuit>& circuits,
                                  const std::vector<QpuHandle>& qpus, const RunOptions& options) {
    if (qpus.size() < circuits.size()) {
        throw Error(ErrorCode::NotEnoughQpus, std::to_string(circuits.size()) + " circuits need " +
                                                  std::to_string(circuits.size()) + " vQPUs, got " +
                                                  std::to_string(qpus.size()));
    }
    std::set<std::string> ids, addresses;
    bool classical = false, quantum = false;
    for (const auto& c : circuits) {
        if (!ids.insert(c.id()).second) throw Error(ErrorCode::DuplicateId, "circuit id " + c.id());
    }
    for (const auto& c : circuits) {
        for (const auto& inst : c.instructions()) {
            classical |= is_classical_comm_name(inst.name);
            quantum |= is_quantum_comm_name(inst.name);
            if (inst.remote && !ids.count(inst.remote->peer)) {
                throw Error(ErrorCode::UnknownPeerId, c.id() + " references " + inst.remote->peer);
            }
        }
    }
    const CommMode need = quantum ? CommMode::Quantum : classical ? CommMode::Classical : CommMode::None;
    for (std::size_t i = 0; i < circuits.size(); ++i) {
        if (!addresses.insert(qpus[i].address()).second) {
            throw Error(ErrorCode::InvalidArgument, "vQPU " + qpus[i].id() + " selected twice");
        }
    }
    for (std::size_t i = 0; i < circuits.size(); ++i) {
        const auto& q = qpus[i];
        if (need != CommMode::None && q.entry().comm_mode != need) {
            throw Error(ErrorCode::CommModeMismatch,
                        q.id() + " runs " + std::string(comm_mode_name(q.entry().comm_mode)) +
                            " communication, the circuits need " + std::string(comm_mode_name(need)));
        }
        check_valid(circuits[i], q);
    }

    const std::string group = new_job_id();
    DistributedSpec spec;
    spec.group = group;
    if (need == CommMode::Classical) {
        for (std::size_t i = 0; i < circuits.size(); ++i) spec.plan[circuits[i].id()] = qpus[i].address();
    }
    if (need == CommMode::Quantum) spec.k = circuits.size();

    std::vector<QJob> jobs;
    for (std::size_t i = 0; i < circuits.size(); ++i) {
        RunConfig rc = base_config(options);
        if (need == CommMode::Classical && options.seed) rc.seed = stream_seed(*options.seed, i);
        if (need != CommMode::None) {
            rc.distributed = spec;
            rc.distributed->index = i;
        }
        const std::string id = group + "." + std::to_string(i);
        jobs.push_back(submit_job(qpus[i], id, run_frame(id, circuits[i], rc), options.queue_retry));
    }
    return jobs;
}

std::vector<ResultRecord> gather(std::vector<QJob>& jobs) {
    std::vector<ResultRecord> out;
    std::optional<Error> first_failure;
    for (auto& j : jobs) {
        try {
            out.push_back(j.result());
        } catch (const Error& e) {
            if (!first_failure) first_failure = e;
        }
    }
    if (first_failure) throw *first_failure;
    return out;
}

std::vector<QJob> distribute_shots(const Circuit& circuit, const std::vector<QpuHandle>& qpus,
                                   std::uint64_t total, const RunOptions& options) {
    if (qpus.empty()) throw Error(ErrorCode::NoQpusAvailable, "no handles to distribute over");
    if (total == 0) throw Error(ErrorCode::InvalidShots, "total shots must be >= 1");
    const std::uint64_t k = qpus.size();
    std::vector<QJob> jobs;
    for (std::uint64_t i = 0; i < k; ++i) {
        const std::uint64_t share = total / k + (i < total % k ? 1 : 0);
        if (share == 0) continue;
        RunOptions o = options;
        o.shots = share;
        if (options.seed) o.seed = stream_seed(*options.seed, i);
        jobs.push_back(run(qpus[i], circuit, o));
    }
    return jobs;
}

Counts aggregate_counts(const std::vector<ResultRecord>& records) {
    Counts total;
    for (const auto& r : records)
        for (const auto& [k, v] : r.counts) total[k] += v;
    return total;
}

}  // namespace vqpu
