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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vqpu {

/// A gate angle: either a literal in radians or a named slot bound later.
struct Param {
    double value = 0.0;
    std::string symbol;

    Param() = default;
    Param(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
    static Param named(std::string name) {
        Param p;
        p.symbol = std::move(name);
        return p;
    }

    bool is_symbolic() const { return !symbol.empty(); }

    friend bool operator==(const Param&, const Param&) = default;
};

enum class LinkRole { Sender, Receiver };

struct RemoteLink {
    std::string peer;
    LinkRole role = LinkRole::Sender;
    std::optional<std::string> gate;  // remote_c_if only
    std::uint64_t seq = 0;

    friend bool operator==(const RemoteLink&, const RemoteLink&) = default;
};

/// Classical condition of a locally conditioned gate: apply iff
/// clbits[clbit] == value.
struct Condition {
    std::size_t clbit = 0;
    int value = 1;

    friend bool operator==(const Condition&, const Condition&) = default;
};

struct Instruction {
    std::string name;
    std::vector<std::size_t> qubits;
    std::vector<std::size_t> clbits;
    std::vector<Param> params;
    std::optional<RemoteLink> remote;
    std::optional<Condition> condition;

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

namespace op {
inline constexpr const char* kMeasure = "measure";
inline constexpr const char* kReset = "reset";
inline constexpr const char* kMeasureAndSend = "measure_and_send";
inline constexpr const char* kRemoteCIf = "remote_c_if";
inline constexpr const char* kQsend = "qsend";
inline constexpr const char* kQrecv = "qrecv";
inline constexpr const char* kExposeBegin = "expose_begin";
inline constexpr const char* kExposeEnd = "expose_end";
}  // namespace op

/// True for the six instruction names that carry a RemoteLink.
bool is_distributed_name(const std::string& name);
/// measure_and_send / remote_c_if.
bool is_classical_comm_name(const std::string& name);
/// qsend / qrecv / expose_begin / expose_end.
bool is_quantum_comm_name(const std::string& name);

/// Generates a fresh UUID-style circuit identifier.
std::string generate_circuit_id();

/// Instruction-list circuit with builder methods for local and distributed
/// operations. Builders validate their own arguments and throw vqpu::Error.
class Circuit {
public:
    Circuit(std::size_t num_qubits, std::size_t num_clbits = 0, std::string id = {});

    const std::string& id() const { return id_; }
    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t num_clbits() const { return num_clbits_; }
    const std::vector<Instruction>& instructions() const { return instructions_; }
    std::size_t size() const { return instructions_.size(); }

    void set_id(std::string id);
    void set_num_clbits(std::size_t n) { num_clbits_ = n; }

    /// Appends without builder checks; used by deserialization and the
    /// structural operators. Validation is the caller's job.
    void append(Instruction inst) { instructions_.push_back(std::move(inst)); }
    std::vector<Instruction>& mutable_instructions() { return instructions_; }

    // Local gates.
    Circuit& gate(const std::string& name, std::vector<std::size_t> qubits,
                  std::vector<Param> params = {});
    Circuit& id_gate(std::size_t q) { return gate("id", {q}); }
    Circuit& x(std::size_t q) { return gate("x", {q}); }
    Circuit& y(std::size_t q) { return gate("y", {q}); }
    Circuit& z(std::size_t q) { return gate("z", {q}); }
    Circuit& h(std::size_t q) { return gate("h", {q}); }
    Circuit& s(std::size_t q) { return gate("s", {q}); }
    Circuit& sdg(std::size_t q) { return gate("sdg", {q}); }
    Circuit& t(std::size_t q) { return gate("t", {q}); }
    Circuit& tdg(std::size_t q) { return gate("tdg", {q}); }
    Circuit& rx(Param theta, std::size_t q) { return gate("rx", {q}, {std::move(theta)}); }
    Circuit& ry(Param theta, std::size_t q) { return gate("ry", {q}, {std::move(theta)}); }
    Circuit& rz(Param lambda, std::size_t q) { return gate("rz", {q}, {std::move(lambda)}); }
    Circuit& u(Param theta, Param phi, Param lambda, std::size_t q) {
        return gate("u", {q}, {std::move(theta), std::move(phi), std::move(lambda)});
    }
    Circuit& cx(std::size_t c, std::size_t t) { return gate("cx", {c, t}); }
    Circuit& cy(std::size_t c, std::size_t t) { return gate("cy", {c, t}); }
    Circuit& cz(std::size_t c, std::size_t t) { return gate("cz", {c, t}); }
    Circuit& crz(Param lambda, std::size_t c, std::size_t t) {
        return gate("crz", {c, t}, {std::move(lambda)});
    }
    Circuit& cp(Param lambda, std::size_t c, std::size_t t) {
        return gate("cp", {c, t}, {std::move(lambda)});
    }
    Circuit& swap(std::size_t a, std::size_t b) { return gate("swap", {a, b}); }

    Circuit& measure(std::size_t qubit, std::size_t clbit);
    /// Measures qubit i into clbit i for every qubit.
    Circuit& measure_all();
    Circuit& reset(std::size_t qubit);

    /// Gate applied only when clbit holds `value` in the current shot.
    Circuit& c_if(const std::string& gate_name, std::vector<std::size_t> qubits,
                  std::size_t clbit, int value = 1, std::vector<Param> params = {});

    // Distributed instructions.
    Circuit& measure_and_send(std::size_t control_qubit, const std::string& target_circuit);
    Circuit& remote_c_if(const std::string& gate_name, std::vector<std::size_t> target_qubits,
                         const std::string& control_circuit, std::vector<Param> params = {});
    Circuit& qsend(std::size_t send_qubit, const std::string& target_circuit);
    Circuit& qrecv(std::size_t recv_qubit, const std::string& control_circuit);

    /// Remote-controlled region: every body entry names a controlled gate
    /// (cx, cy, cz, crz, cp) with `qubits` holding only the target qubits on
    /// the peer circuit; the exposed local qubit is the implicit control.
    Circuit& expose(std::size_t control_qubit, const std::vector<Instruction>& body,
                    const std::string& target_circuit);

    /// Distinct symbolic parameter names in order of first appearance.
    std::vector<std::string> param_slots() const;

    friend bool operator==(const Circuit&, const Circuit&) = default;

private:
    void check_qubit(std::size_t q) const;
    void check_peer(const std::string& peer) const;
    std::uint64_t next_seq(const std::string& name, const std::string& peer) const;

    std::string id_;
    std::size_t num_qubits_;
    std::size_t num_clbits_;
    std::vector<Instruction> instructions_;
};

/// Convenience constructor for an expose body entry.
Instruction remote_gate(const std::string& name, std::vector<std::size_t> target_qubits,
                        std::vector<Param> params = {});

/// True if any instruction carries a RemoteLink.
bool has_distributed(const Circuit& c);
bool has_quantum_comm(const Circuit& c);
bool has_conditions(const Circuit& c);

/// Replaces symbolic params with values bound positionally to param_slots().
Circuit bind_parameters(const Circuit& c, const std::vector<double>& values);

/// Recomputes RemoteLink sequence tags so that they run 0..k-1 per
/// (peer, instruction kind).
void renumber_links(Circuit& c);

}  // namespace vqpu
