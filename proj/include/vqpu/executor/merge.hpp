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
#include <string>
#include <utility>
#include <vector>

#include "vqpu/circuit/circuit.hpp"
#include "vqpu/server/protocol.hpp"
#include "vqpu/sim/engine.hpp"

namespace vqpu {

struct PartSlot {
    Circuit circuit;
    std::size_t qubit_offset = 0;
    std::size_t clbit_offset = 0;
};

enum class PairKind { Teledata, Telegate, ClassicalBit };

/// A matched protocol pair: instruction `from_index` of part `from_part`
/// with instruction `to_index` of part `to_part`. For Telegate the "to"
/// side is the exposed peer and to_index is its cursor at that moment.
struct Pairing {
    PairKind kind;
    std::size_t from_part;
    std::size_t from_index;
    std::size_t to_part;
    std::size_t to_index;

    friend bool operator==(const Pairing&, const Pairing&) = default;
};

/// One scheduled unit of the merged program.
struct MergeStep {
    enum class Kind { Local, Teledata, Telegate, SendBit, RecvBit };
    Kind kind;
    std::size_t part;
    std::size_t index;            // instruction (Telegate: expose_begin) in `part`
    std::size_t peer_part = 0;    // Teledata: receiving part; Telegate: exposed peer
    std::size_t peer_index = 0;   // Teledata: qrecv index; Telegate: expose_end index

    friend bool operator==(const MergeStep&, const MergeStep&) = default;
};

struct MergePlan {
    std::vector<PartSlot> parts;
    std::size_t total_qubits = 0;
    std::pair<std::size_t, std::size_t> comm_qubits{0, 0};
    std::size_t user_clbits = 0;
    std::vector<Pairing> pairings;
    std::vector<MergeStep> schedule;
    /// Next free scratch clbit; scratch bits follow the user clbits.
    std::size_t next_scratch = 0;
};

/// Assigns offsets in submission order and schedules the parts round-robin:
/// each part runs its local instructions until it stalls at a protocol
/// instruction; stalls resolve when the partner is reached. Throws
/// InvalidArgument (< 2 parts), DuplicateId, DanglingProtocol, MergeDeadlock.
MergePlan merge_circuits(const std::vector<Circuit>& parts);

/// Teledata on (a = send, t = recv, c0, c1); allocates two scratch bits.
/// Throws CommQubitCollision.
std::vector<Instruction> expand_teledata(MergePlan& plan, std::size_t send_qubit,
                                         std::size_t recv_qubit);

/// Telegate with control `control_qubit`. Body entries name controlled
/// gates whose qubits list holds only global target qubits; each is emitted
/// with c1 as its control. Allocates two scratch bits. Throws EmptyBody,
/// CommQubitCollision.
std::vector<Instruction> expand_telegate(MergePlan& plan, std::size_t control_qubit,
                                         const std::vector<Instruction>& body);

struct MergedCircuit {
    Circuit circuit;
    /// Global user clbit -> (source circuit id, local clbit).
    std::vector<std::pair<std::string, std::size_t>> origin_map;
    std::size_t user_clbits = 0;
};

/// Emits the scheduled program with every protocol expanded.
MergedCircuit build_merged(MergePlan plan);

/// Drops scratch bits: keeps the rightmost `user_clbits` characters of each
/// key and re-aggregates.
Counts strip_scratch(const Counts& counts, std::size_t user_clbits);

/// Per-shot simulation of the merged circuit with counts over user clbits.
ResultRecord execute_merged(const MergedCircuit& merged, std::uint64_t shots, std::uint64_t seed,
                            const EngineConfig& config = {});

}  // namespace vqpu
