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

#include "vqpu/circuit/circuit.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <utility>

#include "vqpu/error.hpp"
#include "vqpu/sim/gates.hpp"

namespace vqpu {

bool is_classical_comm_name(const std::string& name) {
    return name == op::kMeasureAndSend || name == op::kRemoteCIf;
}

bool is_quantum_comm_name(const std::string& name) {
    return name == op::kQsend || name == op::kQrecv || name == op::kExposeBegin ||
           name == op::kExposeEnd;
}

bool is_distributed_name(const std::string& name) {
    return is_classical_comm_name(name) || is_quantum_comm_name(name);
}

std::string generate_circuit_id() {
    static std::mutex mu;
    static std::mt19937_64 gen{std::random_device{}()};
    std::uint64_t hi, lo;
    {
        std::lock_guard lock(mu);
        hi = gen();
        lo = gen();
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%08x-%04x-4%03x-%04x-%012llx",
                  static_cast<unsigned>(hi >> 32), static_cast<unsigned>((hi >> 16) & 0xffff),
                  static_cast<unsigned>(hi & 0xfff),
                  static_cast<unsigned>(0x8000 | ((lo >> 48) & 0x3fff)),
                  static_cast<unsigned long long>(lo & 0xffffffffffffULL));
    return buf;
}

Circuit::Circuit(std::size_t num_qubits, std::size_t num_clbits, std::string id)
    : id_(id.empty() ? generate_circuit_id() : std::move(id)),
      num_qubits_(num_qubits),
      num_clbits_(num_clbits) {
    if (num_qubits == 0) {
        throw Error(ErrorCode::InvalidArgument, "a circuit needs at least one qubit");
    }
}

void Circuit::set_id(std::string id) {
    if (id.empty()) throw Error(ErrorCode::InvalidArgument, "circuit id must be non-empty");
    id_ = std::move(id);
}

void Circuit::check_qubit(std::size_t q) const {
    if (q >= num_qubits_) {
        throw Error(ErrorCode::QubitOutOfRange, "qubit " + std::to_string(q) + " not in circuit '" +
                                                    id_ + "' of width " +
                                                    std::to_string(num_qubits_));
    }
}

void Circuit::check_peer(const std::string& peer) const {
    if (peer.empty()) throw Error(ErrorCode::MalformedRemote, "empty peer circuit id");
    if (peer == id_) {
        throw Error(ErrorCode::SelfLink, "circuit '" + id_ + "' cannot link to itself");
    }
}

std::uint64_t Circuit::next_seq(const std::string& name, const std::string& peer) const {
    return static_cast<std::uint64_t>(
        std::count_if(instructions_.begin(), instructions_.end(), [&](const Instruction& i) {
            return i.name == name && i.remote && i.remote->peer == peer;
        }));
}

namespace {

const GateSpec& require_gate(const std::string& name, std::size_t nqubits, std::size_t nparams) {
    const GateSpec* spec = find_gate(name);
    if (spec == nullptr) throw Error(ErrorCode::UnknownGate, name);
    if (spec->num_qubits != nqubits || spec->num_params != nparams) {
        throw Error(ErrorCode::ArityMismatch,
                    name + " takes " + std::to_string(spec->num_qubits) + " qubits and " +
                        std::to_string(spec->num_params) + " params, got " +
                        std::to_string(nqubits) + " and " + std::to_string(nparams));
    }
    return *spec;
}

void require_distinct(const std::vector<std::size_t>& qubits) {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        for (std::size_t j = i + 1; j < qubits.size(); ++j) {
            if (qubits[i] == qubits[j]) {
                throw Error(ErrorCode::InvalidArgument, "repeated qubit " + std::to_string(qubits[i]));
            }
        }
    }
}

}  // namespace

Circuit& Circuit::gate(const std::string& name, std::vector<std::size_t> qubits,
                       std::vector<Param> params) {
    require_gate(name, qubits.size(), params.size());
    for (auto q : qubits) check_qubit(q);
    require_distinct(qubits);
    instructions_.push_back(Instruction{name, std::move(qubits), {}, std::move(params), {}, {}});
    return *this;
}

Circuit& Circuit::measure(std::size_t qubit, std::size_t clbit) {
    check_qubit(qubit);
    if (clbit >= num_clbits_) {
        throw Error(ErrorCode::DanglingClbit, "clbit " + std::to_string(clbit) + " not declared");
    }
    instructions_.push_back(Instruction{op::kMeasure, {qubit}, {clbit}, {}, {}, {}});
    return *this;
}

Circuit& Circuit::measure_all() {
    num_clbits_ = std::max(num_clbits_, num_qubits_);
    for (std::size_t q = 0; q < num_qubits_; ++q) measure(q, q);
    return *this;
}

Circuit& Circuit::reset(std::size_t qubit) {
    check_qubit(qubit);
    instructions_.push_back(Instruction{op::kReset, {qubit}, {}, {}, {}, {}});
    return *this;
}

Circuit& Circuit::c_if(const std::string& gate_name, std::vector<std::size_t> qubits,
                       std::size_t clbit, int value, std::vector<Param> params) {
    require_gate(gate_name, qubits.size(), params.size());
    for (auto q : qubits) check_qubit(q);
    require_distinct(qubits);
    if (clbit >= num_clbits_) {
        throw Error(ErrorCode::DanglingClbit, "clbit " + std::to_string(clbit) + " not declared");
    }
    if (value != 0 && value != 1) {
        throw Error(ErrorCode::InvalidArgument, "condition value must be 0 or 1");
    }
    instructions_.push_back(
        Instruction{gate_name, std::move(qubits), {}, std::move(params), {}, Condition{clbit, value}});
    return *this;
}

Circuit& Circuit::measure_and_send(std::size_t control_qubit, const std::string& target_circuit) {
    check_qubit(control_qubit);
    check_peer(target_circuit);
    RemoteLink link{target_circuit, LinkRole::Sender, std::nullopt,
                    next_seq(op::kMeasureAndSend, target_circuit)};
    instructions_.push_back(Instruction{op::kMeasureAndSend, {control_qubit}, {}, {}, link, {}});
    return *this;
}

Circuit& Circuit::remote_c_if(const std::string& gate_name, std::vector<std::size_t> target_qubits,
                              const std::string& control_circuit, std::vector<Param> params) {
    require_gate(gate_name, target_qubits.size(), params.size());
    for (auto q : target_qubits) check_qubit(q);
    require_distinct(target_qubits);
    check_peer(control_circuit);
    RemoteLink link{control_circuit, LinkRole::Receiver, gate_name,
                    next_seq(op::kRemoteCIf, control_circuit)};
    instructions_.push_back(
        Instruction{op::kRemoteCIf, std::move(target_qubits), {}, std::move(params), link, {}});
    return *this;
}

Circuit& Circuit::qsend(std::size_t send_qubit, const std::string& target_circuit) {
    check_qubit(send_qubit);
    check_peer(target_circuit);
    RemoteLink link{target_circuit, LinkRole::Sender, std::nullopt,
                    next_seq(op::kQsend, target_circuit)};
    instructions_.push_back(Instruction{op::kQsend, {send_qubit}, {}, {}, link, {}});
    return *this;
}

Circuit& Circuit::qrecv(std::size_t recv_qubit, const std::string& control_circuit) {
    check_qubit(recv_qubit);
    check_peer(control_circuit);
    RemoteLink link{control_circuit, LinkRole::Receiver, std::nullopt,
                    next_seq(op::kQrecv, control_circuit)};
    instructions_.push_back(Instruction{op::kQrecv, {recv_qubit}, {}, {}, link, {}});
    return *this;
}

Circuit& Circuit::expose(std::size_t control_qubit, const std::vector<Instruction>& body,
                         const std::string& target_circuit) {
    check_qubit(control_qubit);
    check_peer(target_circuit);
    if (body.empty()) throw Error(ErrorCode::EmptyBody, "expose region needs at least one gate");
    for (const auto& g : body) {
        if (is_distributed_name(g.name) || g.remote) {
            throw Error(ErrorCode::NotSupported,
                        "expose regions cannot nest or contain distributed instructions");
        }
        const GateSpec* spec = find_gate(g.name);
        if (spec == nullptr) throw Error(ErrorCode::UnknownGate, g.name);
        if (spec->shape != GateShape::Controlled) {
            throw Error(ErrorCode::NotSupported,
                        "expose body gates must be controlled gates, got " + g.name);
        }
        if (g.qubits.size() != 1 || g.params.size() != spec->num_params) {
            throw Error(ErrorCode::ArityMismatch,
                        "expose body gate " + g.name + " takes one peer target qubit and " +
                            std::to_string(spec->num_params) + " params");
        }
        if (g.condition) {
            throw Error(ErrorCode::NotSupported, "conditioned gates inside expose");
        }
    }
    const std::uint64_t seq = next_seq(op::kExposeBegin, target_circuit);
    RemoteLink link{target_circuit, LinkRole::Sender, std::nullopt, seq};
    instructions_.push_back(Instruction{op::kExposeBegin, {control_qubit}, {}, {}, link, {}});
    for (const auto& g : body) {
        instructions_.push_back(Instruction{g.name, g.qubits, {}, g.params, {}, {}});
    }
    instructions_.push_back(Instruction{op::kExposeEnd, {control_qubit}, {}, {}, link, {}});
    return *this;
}

std::vector<std::string> Circuit::param_slots() const {
    std::vector<std::string> slots;
    for (const auto& inst : instructions_) {
        for (const auto& p : inst.params) {
            if (p.is_symbolic() &&
                std::find(slots.begin(), slots.end(), p.symbol) == slots.end()) {
                slots.push_back(p.symbol);
            }
        }
    }
    return slots;
}

Instruction remote_gate(const std::string& name, std::vector<std::size_t> target_qubits,
                        std::vector<Param> params) {
    return Instruction{name, std::move(target_qubits), {}, std::move(params), {}, {}};
}

bool has_distributed(const Circuit& c) {
    return std::any_of(c.instructions().begin(), c.instructions().end(),
                       [](const Instruction& i) { return is_distributed_name(i.name); });
}

bool has_quantum_comm(const Circuit& c) {
    return std::any_of(c.instructions().begin(), c.instructions().end(),
                       [](const Instruction& i) { return is_quantum_comm_name(i.name); });
}

bool has_conditions(const Circuit& c) {
    return std::any_of(c.instructions().begin(), c.instructions().end(),
                       [](const Instruction& i) { return i.condition.has_value(); });
}

Circuit bind_parameters(const Circuit& c, const std::vector<double>& values) {
    const auto slots = c.param_slots();
    if (slots.size() != values.size()) {
        throw Error(ErrorCode::ArityMismatch, "circuit declares " + std::to_string(slots.size()) +
                                                  " parameters, got " +
                                                  std::to_string(values.size()) + " values");
    }
    Circuit out = c;
    for (auto& inst : out.mutable_instructions()) {
        for (auto& p : inst.params) {
            if (!p.is_symbolic()) continue;
            const auto it = std::find(slots.begin(), slots.end(), p.symbol);
            p = Param(values[static_cast<std::size_t>(it - slots.begin())]);
        }
    }
    return out;
}

void renumber_links(Circuit& c) {
    std::map<std::pair<std::string, std::string>, std::uint64_t> counters;
    std::optional<std::uint64_t> open_expose;
    for (auto& inst : c.mutable_instructions()) {
        if (!inst.remote) continue;
        if (inst.name == op::kExposeEnd) {
            if (open_expose) inst.remote->seq = *open_expose;
            open_expose.reset();
            continue;
        }
        auto& counter = counters[{inst.name, inst.remote->peer}];
        inst.remote->seq = counter++;
        if (inst.name == op::kExposeBegin) open_expose = inst.remote->seq;
    }
}

}  // namespace vqpu
