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

#include "vqpu/sim/engine.hpp"

#include <algorithm>
#include <numeric>

#include "vqpu/error.hpp"

namespace vqpu {
namespace {

enum class OpKind { Single, Controlled, Swap, Measure, Reset, MeasureAndSend, Noop };

struct CompiledOp {
    OpKind kind = OpKind::Noop;
    Matrix2 matrix{};
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t clbit = 0;
    std::optional<Condition> condition;
    const RemoteLink* remote = nullptr;  // MeasureAndSend, or remote-conditioned gate
};

std::vector<double> literal_params(const Instruction& inst) {
    std::vector<double> out;
    out.reserve(inst.params.size());
    for (const auto& p : inst.params) {
        if (p.is_symbolic()) {
            throw Error(ErrorCode::UnboundParameter,
                        "parameter '" + p.symbol + "' of " + inst.name + " is unbound");
        }
        out.push_back(p.value);
    }
    return out;
}

void check_qubits(const Circuit& c, const Instruction& inst) {
    for (auto q : inst.qubits) {
        if (q >= c.num_qubits()) {
            throw Error(ErrorCode::QubitOutOfRange,
                        inst.name + " on qubit " + std::to_string(q) + " of a " +
                            std::to_string(c.num_qubits()) + "-qubit circuit");
        }
    }
}

void check_clbit(const Circuit& c, std::size_t clbit, const std::string& what) {
    if (clbit >= c.num_clbits()) {
        throw Error(ErrorCode::DanglingClbit,
                    what + " uses clbit " + std::to_string(clbit) + " of " +
                        std::to_string(c.num_clbits()));
    }
}

CompiledOp compile_gate(const Circuit& c, const std::string& name, const Instruction& inst) {
    const GateSpec* spec = find_gate(name);
    if (spec == nullptr) throw Error(ErrorCode::UnknownGate, name);
    if (inst.qubits.size() != spec->num_qubits || inst.params.size() != spec->num_params) {
        throw Error(ErrorCode::ArityMismatch, name);
    }
    check_qubits(c, inst);
    CompiledOp op;
    op.a = inst.qubits[0];
    if (spec->num_qubits == 2) {
        op.b = inst.qubits[1];
        if (op.a == op.b) throw Error(ErrorCode::InvalidArgument, name + " on a repeated qubit");
    }
    switch (spec->shape) {
        case GateShape::Single:
            op.kind = spec->name == "id" ? OpKind::Noop : OpKind::Single;
            break;
        case GateShape::Controlled:
            op.kind = OpKind::Controlled;
            break;
        case GateShape::Swap:
            op.kind = OpKind::Swap;
            break;
    }
    if (op.kind != OpKind::Swap) op.matrix = gate_matrix(*spec, literal_params(inst));
    return op;
}

std::vector<CompiledOp> compile(const Circuit& c, const EngineConfig& config) {
    if (c.num_qubits() > config.max_qubits) {
        throw Error(ErrorCode::WidthExceeded, "circuit '" + c.id() + "' has " +
                                                  std::to_string(c.num_qubits()) +
                                                  " qubits, engine cap is " +
                                                  std::to_string(config.max_qubits));
    }
    std::vector<CompiledOp> ops;
    ops.reserve(c.size());
    for (const auto& inst : c.instructions()) {
        if (is_quantum_comm_name(inst.name)) {
            throw Error(ErrorCode::UnsupportedInstruction,
                        inst.name + " needs the quantum-communication executor");
        }
        CompiledOp op;
        if (inst.name == op::kMeasure) {
            check_qubits(c, inst);
            if (inst.qubits.size() != 1 || inst.clbits.size() != 1) {
                throw Error(ErrorCode::ArityMismatch, "measure takes one qubit and one clbit");
            }
            check_clbit(c, inst.clbits[0], "measure");
            op.kind = OpKind::Measure;
            op.a = inst.qubits[0];
            op.clbit = inst.clbits[0];
        } else if (inst.name == op::kReset) {
            check_qubits(c, inst);
            if (inst.qubits.size() != 1) throw Error(ErrorCode::ArityMismatch, "reset");
            op.kind = OpKind::Reset;
            op.a = inst.qubits[0];
        } else if (inst.name == op::kMeasureAndSend) {
            check_qubits(c, inst);
            if (inst.qubits.size() != 1 || !inst.remote) {
                throw Error(ErrorCode::MalformedRemote, "measure_and_send");
            }
            op.kind = OpKind::MeasureAndSend;
            op.a = inst.qubits[0];
            op.remote = &*inst.remote;
        } else if (inst.name == op::kRemoteCIf) {
            if (!inst.remote || !inst.remote->gate) {
                throw Error(ErrorCode::MalformedRemote, "remote_c_if without gate name");
            }
            op = compile_gate(c, *inst.remote->gate, inst);
            op.remote = &*inst.remote;
        } else {
            op = compile_gate(c, inst.name, inst);
        }
        if (inst.condition) {
            check_clbit(c, inst.condition->clbit, "condition of " + inst.name);
            op.condition = inst.condition;
        }
        ops.push_back(op);
    }
    return ops;
}

void apply_compiled(StateVector& state, const CompiledOp& op) {
    switch (op.kind) {
        case OpKind::Single:
            state.apply_single(op.matrix, op.a);
            break;
        case OpKind::Controlled:
            state.apply_controlled(op.matrix, op.a, op.b);
            break;
        case OpKind::Swap:
            state.apply_swap(op.a, op.b);
            break;
        default:
            break;
    }
}

void execute_shot(const Circuit& circuit, const std::vector<CompiledOp>& ops, StateVector& state,
                  std::vector<int>& bits, ShotRng& rng, std::uint64_t shot,
                  const ChannelHooks& hooks) {
    for (const auto& op : ops) {
        if (op.condition && bits[op.condition->clbit] != op.condition->value) continue;
        switch (op.kind) {
            case OpKind::Measure:
                bits[op.clbit] = measure_qubit(state, op.a, rng);
                break;
            case OpKind::Reset:
                reset_qubit(state, op.a, rng);
                break;
            case OpKind::MeasureAndSend: {
                const int bit = measure_qubit(state, op.a, rng);
                if (!hooks.send) {
                    throw Error(ErrorCode::UnsupportedInstruction,
                                "measure_and_send without a classical channel");
                }
                hooks.send(op.remote->peer, shot, op.remote->seq, bit);
                break;
            }
            case OpKind::Noop:
                break;
            default:
                if (op.remote != nullptr) {
                    if (!hooks.recv) {
                        throw Error(ErrorCode::UnsupportedInstruction,
                                    "remote_c_if without a classical channel");
                    }
                    if (hooks.recv(op.remote->peer, shot, op.remote->seq) != 1) break;
                }
                apply_compiled(state, op);
                break;
        }
    }
    (void)circuit;
}

template <typename F>
auto with_shot_context(std::uint64_t shot, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), "shot " + std::to_string(shot) + ": " + e.detail());
    } catch (const std::exception& e) {
        throw Error(ErrorCode::Internal, "shot " + std::to_string(shot) + ": " + e.what());
    }
}

}  // namespace

std::string bits_to_key(std::span<const int> bits) {
    std::string key(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0) key[bits.size() - 1 - i] = '1';
    }
    return key;
}

std::uint64_t total_shots(const Counts& counts) {
    std::uint64_t total = 0;
    for (const auto& [key, n] : counts) total += n;
    return total;
}

bool is_sampling_admissible(const Circuit& circuit) {
    std::vector<bool> measured(circuit.num_qubits(), false);
    for (const auto& inst : circuit.instructions()) {
        if (is_distributed_name(inst.name) || inst.condition || inst.name == op::kReset) {
            return false;
        }
        if (inst.name == op::kMeasure) {
            for (auto q : inst.qubits) {
                if (q < measured.size()) measured[q] = true;
            }
            continue;
        }
        for (auto q : inst.qubits) {
            if (q < measured.size() && measured[q]) return false;
        }
    }
    return true;
}

Counts run_sampled(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed,
                   const EngineConfig& config) {
    if (shots == 0) throw Error(ErrorCode::InvalidShots, "shots must be >= 1");
    if (!is_sampling_admissible(circuit)) {
        throw Error(ErrorCode::UnsupportedInstruction,
                    "circuit '" + circuit.id() +
                        "' needs the shot loop (conditions, resets, mid-circuit measurement or "
                        "distributed instructions)");
    }
    const auto ops = compile(circuit, config);
    StateVector state(circuit.num_qubits());
    // Terminal measurement map: (qubit, clbit) pairs in program order.
    std::vector<std::pair<std::size_t, std::size_t>> terminal;
    for (const auto& op : ops) {
        if (op.kind == OpKind::Measure) {
            terminal.emplace_back(op.a, op.clbit);
        } else {
            apply_compiled(state, op);
        }
    }

    // Marginal over the distinct measured qubits.
    std::vector<std::size_t> measured;
    for (const auto& [q, c] : terminal) {
        if (std::find(measured.begin(), measured.end(), q) == measured.end()) measured.push_back(q);
    }
    const std::size_t k = measured.size();
    std::vector<double> marginal(std::size_t{1} << k, 0.0);
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        if (p == 0.0) continue;
        std::size_t pattern = 0;
        for (std::size_t j = 0; j < k; ++j) pattern |= ((i >> measured[j]) & 1U) << j;
        marginal[pattern] += p;
    }
    std::vector<double> cumulative(marginal.size());
    std::partial_sum(marginal.begin(), marginal.end(), cumulative.begin());
    const double total = cumulative.back();

    std::vector<std::uint64_t> hits(marginal.size(), 0);
    ShotRng rng = ShotRng::for_stream(seed, 0);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
        if (idx >= cumulative.size()) idx = cumulative.size() - 1;
        // Skip zero-probability patterns that share a cumulative value.
        while (marginal[idx] == 0.0 && idx > 0) --idx;
        ++hits[idx];
    }

    Counts counts;
    std::vector<int> bits(circuit.num_clbits(), 0);
    for (std::size_t pattern = 0; pattern < hits.size(); ++pattern) {
        if (hits[pattern] == 0) continue;
        std::fill(bits.begin(), bits.end(), 0);
        for (const auto& [q, c] : terminal) {
            const auto j = static_cast<std::size_t>(
                std::find(measured.begin(), measured.end(), q) - measured.begin());
            bits[c] = static_cast<int>((pattern >> j) & 1U);
        }
        counts[bits_to_key(bits)] += hits[pattern];
    }
    return counts;
}

Counts run_shot_loop(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed,
                     const ChannelHooks& hooks, const EngineConfig& config) {
    if (shots == 0) throw Error(ErrorCode::InvalidShots, "shots must be >= 1");
    const auto ops = compile(circuit, config);
    Counts counts;
    std::vector<int> bits(circuit.num_clbits(), 0);
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        with_shot_context(shot, [&] {
            StateVector state(circuit.num_qubits());
            std::fill(bits.begin(), bits.end(), 0);
            ShotRng rng = ShotRng::for_stream(seed, shot);
            execute_shot(circuit, ops, state, bits, rng, shot, hooks);
        });
        ++counts[bits_to_key(bits)];
    }
    return counts;
}

ShotRecord run_single_shot(const Circuit& circuit, std::uint64_t seed, std::uint64_t shot_index,
                           StateVector* final_state, const ChannelHooks& hooks,
                           const EngineConfig& config) {
    const auto ops = compile(circuit, config);
    ShotRecord record{shot_index, std::vector<int>(circuit.num_clbits(), 0)};
    StateVector state(circuit.num_qubits());
    with_shot_context(shot_index, [&] {
        ShotRng rng = ShotRng::for_stream(seed, shot_index);
        execute_shot(circuit, ops, state, record.classical_bits, rng, shot_index, hooks);
    });
    if (final_state != nullptr) *final_state = std::move(state);
    return record;
}

StateVector simulate_statevector(const Circuit& circuit, const EngineConfig& config) {
    const auto ops = compile(circuit, config);
    StateVector state(circuit.num_qubits());
    for (const auto& op : ops) {
        if (op.condition || op.remote != nullptr || op.kind == OpKind::Measure ||
            op.kind == OpKind::Reset || op.kind == OpKind::MeasureAndSend) {
            throw Error(ErrorCode::UnsupportedInstruction,
                        "statevector simulation accepts unitary instructions only");
        }
        apply_compiled(state, op);
    }
    return state;
}

}  // namespace vqpu
