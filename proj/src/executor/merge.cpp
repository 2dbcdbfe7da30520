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

#include "vqpu/executor/merge.hpp"

#include <chrono>
#include <deque>
#include <map>
#include <set>

#include "vqpu/error.hpp"
#include "vqpu/sim/gates.hpp"
#include "vqpu/sim/rng.hpp"

namespace vqpu {

namespace {

bool blocks(const std::string& name) {
    return name == op::kQsend || name == op::kQrecv || name == op::kRemoteCIf ||
           name == op::kExposeBegin;
}

std::string where(const Circuit& c, std::size_t index) {
    return c.id() + " instruction " + std::to_string(index) + " (" + c.instructions()[index].name +
           ")";
}

std::size_t expose_end_of(const Circuit& c, std::size_t begin) {
    for (std::size_t i = begin + 1; i < c.size(); ++i) {
        if (c.instructions()[i].name == op::kExposeEnd) return i;
    }
    throw Error(ErrorCode::DanglingProtocol, where(c, begin) + " has no expose_end");
}

Instruction make(std::string name, std::vector<std::size_t> qubits,
                 std::vector<std::size_t> clbits = {}, std::optional<Condition> cond = {}) {
    Instruction inst;
    inst.name = std::move(name);
    inst.qubits = std::move(qubits);
    inst.clbits = std::move(clbits);
    inst.condition = cond;
    return inst;
}

void check_collision(const MergePlan& plan, std::size_t q, const char* role) {
    if (q == plan.comm_qubits.first || q == plan.comm_qubits.second) {
        throw Error(ErrorCode::CommQubitCollision,
                    std::string(role) + " qubit " + std::to_string(q) + " is a communication qubit");
    }
    if (q >= plan.total_qubits) {
        throw Error(ErrorCode::QubitOutOfRange, std::string(role) + " qubit " + std::to_string(q));
    }
}

}  // namespace

MergePlan merge_circuits(const std::vector<Circuit>& parts) {
    if (parts.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "merging needs at least 2 parts, got " +
                                                    std::to_string(parts.size()));
    }
    MergePlan plan;
    std::map<std::string, std::size_t> index_of;
    std::size_t qoff = 0, coff = 0;
    for (const auto& c : parts) {
        if (!index_of.emplace(c.id(), plan.parts.size()).second) {
            throw Error(ErrorCode::DuplicateId, "circuit id '" + c.id() + "' appears twice");
        }
        plan.parts.push_back({c, qoff, coff});
        qoff += c.num_qubits();
        coff += c.num_clbits();
    }
    plan.total_qubits = qoff + 2;
    plan.comm_qubits = {qoff, qoff + 1};
    plan.user_clbits = coff;
    plan.next_scratch = coff;

    for (const auto& slot : plan.parts) {
        for (std::size_t i = 0; i < slot.circuit.size(); ++i) {
            const auto& inst = slot.circuit.instructions()[i];
            if (inst.remote && !index_of.count(inst.remote->peer)) {
                throw Error(ErrorCode::DanglingProtocol,
                            where(slot.circuit, i) + " names absent peer '" + inst.remote->peer + "'");
            }
        }
    }

    const std::size_t k = plan.parts.size();
    std::vector<std::size_t> cursor(k, 0);
    // Pending classical bits per (sender, receiver): sender instruction indices.
    std::map<std::pair<std::size_t, std::size_t>, std::deque<std::size_t>> fifo;

    auto inst_at = [&](std::size_t p) -> const Instruction& {
        return plan.parts[p].circuit.instructions()[cursor[p]];
    };
    auto finished = [&](std::size_t p) { return cursor[p] >= plan.parts[p].circuit.size(); };
    auto peer_of = [&](std::size_t p) { return index_of.at(inst_at(p).remote->peer); };

    // Runs locals and sends until the part stalls; true if anything ran.
    auto advance = [&](std::size_t p) {
        bool moved = false;
        while (!finished(p)) {
            const auto& inst = inst_at(p);
            if (inst.name == op::kMeasureAndSend) {
                fifo[{p, peer_of(p)}].push_back(cursor[p]);
                plan.schedule.push_back({MergeStep::Kind::SendBit, p, cursor[p]});
            } else if (blocks(inst.name)) {
                break;
            } else if (inst.name == op::kExposeEnd) {
                throw Error(ErrorCode::DanglingProtocol,
                            where(plan.parts[p].circuit, cursor[p]) + " without expose_begin");
            } else {
                plan.schedule.push_back({MergeStep::Kind::Local, p, cursor[p]});
            }
            ++cursor[p];
            moved = true;
        }
        return moved;
    };

    auto try_resolve = [&](std::size_t p) {
        if (finished(p)) return false;
        const auto& inst = inst_at(p);
        const std::size_t q = peer_of(p);
        if (inst.name == op::kRemoteCIf) {
            auto& queue = fifo[{q, p}];
            if (queue.empty()) return false;
            plan.pairings.push_back({PairKind::ClassicalBit, q, queue.front(), p, cursor[p]});
            queue.pop_front();
            plan.schedule.push_back({MergeStep::Kind::RecvBit, p, cursor[p]});
            ++cursor[p];
            return true;
        }
        if (inst.name == op::kQsend || inst.name == op::kQrecv) {
            if (finished(q)) return false;
            const auto& other = inst_at(q);
            const bool matches = other.remote && other.remote->peer == plan.parts[p].circuit.id() &&
                                 other.remote->seq == inst.remote->seq &&
                                 ((inst.name == op::kQsend && other.name == op::kQrecv) ||
                                  (inst.name == op::kQrecv && other.name == op::kQsend));
            if (!matches) return false;
            const std::size_t s = inst.name == op::kQsend ? p : q;
            const std::size_t r = inst.name == op::kQsend ? q : p;
            plan.pairings.push_back({PairKind::Teledata, s, cursor[s], r, cursor[r]});
            plan.schedule.push_back({MergeStep::Kind::Teledata, s, cursor[s], r, cursor[r]});
            ++cursor[s];
            ++cursor[r];
            return true;
        }
        if (inst.name == op::kExposeBegin) {
            const bool at_rest = finished(q) || is_distributed_name(inst_at(q).name);
            if (!at_rest) return false;
            const std::size_t end = expose_end_of(plan.parts[p].circuit, cursor[p]);
            plan.pairings.push_back({PairKind::Telegate, p, cursor[p], q, cursor[q]});
            plan.schedule.push_back({MergeStep::Kind::Telegate, p, cursor[p], q, end});
            cursor[p] = end + 1;
            return true;
        }
        return false;
    };

    for (;;) {
        bool progressed = false;
        for (std::size_t p = 0; p < k; ++p) {
            progressed = advance(p) || progressed;
            if (try_resolve(p)) {
                progressed = true;
                advance(p);
            }
        }
        bool all_done = true;
        for (std::size_t p = 0; p < k; ++p) all_done = all_done && finished(p);
        if (all_done) break;
        if (progressed) continue;

        // Nothing can move: distinguish a missing partner from a cycle.
        for (std::size_t p = 0; p < k; ++p) {
            if (finished(p)) continue;
            const auto& inst = inst_at(p);
            const std::size_t q = peer_of(p);
            const bool partner_gone =
                inst.name == op::kExposeBegin ? false
                : inst.name == op::kRemoteCIf ? finished(q) && fifo[{q, p}].empty()
                                              : finished(q);
            if (partner_gone) {
                throw Error(ErrorCode::DanglingProtocol,
                            where(plan.parts[p].circuit, cursor[p]) + " (seq " +
                                std::to_string(inst.remote->seq) + ") has no partner in " +
                                plan.parts[q].circuit.id());
            }
        }
        std::string stalled;
        for (std::size_t p = 0; p < k; ++p) {
            if (finished(p)) continue;
            if (!stalled.empty()) stalled += ", ";
            stalled += where(plan.parts[p].circuit, cursor[p]);
        }
        throw Error(ErrorCode::MergeDeadlock, "all parts stalled: " + stalled);
    }
    for (const auto& [pair, queue] : fifo) {
        if (!queue.empty()) {
            throw Error(ErrorCode::DanglingProtocol,
                        where(plan.parts[pair.first].circuit, queue.front()) +
                            " sends a bit nobody receives");
        }
    }
    return plan;
}

std::vector<Instruction> expand_teledata(MergePlan& plan, std::size_t a, std::size_t t) {
    check_collision(plan, a, "send");
    check_collision(plan, t, "receive");
    const auto [c0, c1] = plan.comm_qubits;
    const std::size_t m1 = plan.next_scratch++;
    const std::size_t m2 = plan.next_scratch++;
    return {
        make("reset", {c0}),
        make("reset", {c1}),
        make("h", {c0}),
        make("cx", {c0, c1}),
        make("cx", {a, c0}),
        make("h", {a}),
        make("measure", {a}, {m1}),
        make("measure", {c0}, {m2}),
        make("x", {c1}, {}, Condition{m2, 1}),
        make("z", {c1}, {}, Condition{m1, 1}),
        make("swap", {c1, t}),
        make("reset", {c1}),
        make("reset", {c0}),
    };
}

std::vector<Instruction> expand_telegate(MergePlan& plan, std::size_t a,
                                         const std::vector<Instruction>& body) {
    if (body.empty()) throw Error(ErrorCode::EmptyBody, "telegate without body gates");
    check_collision(plan, a, "control");
    const auto [c0, c1] = plan.comm_qubits;
    for (const auto& g : body) {
        for (auto q : g.qubits) check_collision(plan, q, "target");
    }
    const std::size_t m = plan.next_scratch++;
    const std::size_t m2 = plan.next_scratch++;
    std::vector<Instruction> out{
        make("reset", {c0}),
        make("reset", {c1}),
        make("h", {c0}),
        make("cx", {c0, c1}),
        make("cx", {a, c0}),
        make("measure", {c0}, {m}),
        make("x", {c1}, {}, Condition{m, 1}),
    };
    for (const auto& g : body) {
        const GateSpec* spec = find_gate(g.name);
        if (spec == nullptr || spec->shape != GateShape::Controlled) {
            throw Error(ErrorCode::NotSupported, "telegate body gate " + g.name + " is not controlled");
        }
        Instruction inst = g;
        inst.qubits.insert(inst.qubits.begin(), c1);
        inst.remote.reset();
        out.push_back(std::move(inst));
    }
    out.push_back(make("h", {c1}));
    out.push_back(make("measure", {c1}, {m2}));
    out.push_back(make("z", {a}, {}, Condition{m2, 1}));
    out.push_back(make("reset", {c1}));
    out.push_back(make("reset", {c0}));
    return out;
}

MergedCircuit build_merged(MergePlan plan) {
    std::vector<Instruction> program;
    // Scratch bit carrying each classical send, keyed by (part, index).
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> sent_bit;
    // Receiver (part, index) -> matching sender (part, index).
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> source_of;
    for (const auto& pr : plan.pairings) {
        if (pr.kind == PairKind::ClassicalBit) {
            source_of[{pr.to_part, pr.to_index}] = {pr.from_part, pr.from_index};
        }
    }

    auto globalize = [&](std::size_t p, Instruction inst) {
        const auto& slot = plan.parts[p];
        for (auto& q : inst.qubits) q += slot.qubit_offset;
        for (auto& c : inst.clbits) c += slot.clbit_offset;
        if (inst.condition) inst.condition->clbit += slot.clbit_offset;
        return inst;
    };

    for (const auto& step : plan.schedule) {
        const auto& src = plan.parts[step.part];
        const Instruction& inst = src.circuit.instructions()[step.index];
        switch (step.kind) {
            case MergeStep::Kind::Local:
                program.push_back(globalize(step.part, inst));
                break;
            case MergeStep::Kind::SendBit: {
                const std::size_t bit = plan.next_scratch++;
                sent_bit[{step.part, step.index}] = bit;
                program.push_back(make("measure", {inst.qubits[0] + src.qubit_offset}, {bit}));
                break;
            }
            case MergeStep::Kind::RecvBit: {
                const std::size_t bit = sent_bit.at(source_of.at({step.part, step.index}));
                Instruction g = globalize(step.part, inst);
                g.name = *inst.remote->gate;
                g.remote.reset();
                g.condition = Condition{bit, 1};
                program.push_back(std::move(g));
                break;
            }
            case MergeStep::Kind::Teledata: {
                const auto& recv = plan.parts[step.peer_part];
                const std::size_t a = inst.qubits[0] + src.qubit_offset;
                const std::size_t t =
                    recv.circuit.instructions()[step.peer_index].qubits[0] + recv.qubit_offset;
                for (auto& x : expand_teledata(plan, a, t)) program.push_back(std::move(x));
                break;
            }
            case MergeStep::Kind::Telegate: {
                const auto& peer = plan.parts[step.peer_part];
                std::vector<Instruction> body;
                for (std::size_t i = step.index + 1; i < step.peer_index; ++i) {
                    Instruction g = src.circuit.instructions()[i];
                    for (auto& q : g.qubits) {
                        if (q >= peer.circuit.num_qubits()) {
                            throw Error(ErrorCode::QubitOutOfRange,
                                        where(src.circuit, i) + " targets qubit " +
                                            std::to_string(q) + " of " + peer.circuit.id());
                        }
                        q += peer.qubit_offset;
                    }
                    body.push_back(std::move(g));
                }
                const std::size_t a = inst.qubits[0] + src.qubit_offset;
                for (auto& x : expand_telegate(plan, a, body)) program.push_back(std::move(x));
                break;
            }
        }
    }

    std::string id = "merged";
    for (const auto& slot : plan.parts) id += "+" + slot.circuit.id();
    MergedCircuit out{Circuit(plan.total_qubits, plan.next_scratch, id), {}, plan.user_clbits};
    for (auto& inst : program) out.circuit.append(std::move(inst));
    for (const auto& slot : plan.parts) {
        for (std::size_t c = 0; c < slot.circuit.num_clbits(); ++c) {
            out.origin_map.emplace_back(slot.circuit.id(), c);
        }
    }
    return out;
}

Counts strip_scratch(const Counts& counts, std::size_t user_clbits) {
    Counts out;
    for (const auto& [key, n] : counts) {
        const std::size_t keep = std::min(user_clbits, key.size());
        out[key.substr(key.size() - keep)] += n;
    }
    return out;
}

ResultRecord execute_merged(const MergedCircuit& merged, std::uint64_t shots, std::uint64_t seed,
                            const EngineConfig& config) {
    if (has_distributed(merged.circuit)) {
        throw Error(ErrorCode::UnsupportedInstruction, "merged circuit still holds protocol instructions");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const Counts raw = run_shot_loop(merged.circuit, shots, seed, {}, config);
    ResultRecord r;
    r.time_taken = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.counts = strip_scratch(raw, merged.user_clbits);
    r.metadata = {{"seed", seed},
                  {"shots", shots},
                  {"engine", "statevector"},
                  {"rng", std::string(kRngAlgorithm)},
                  {"mode", "shot_loop"},
                  {"merged_qubits", merged.circuit.num_qubits()},
                  {"scratch_clbits", merged.circuit.num_clbits() - merged.user_clbits}};
    return r;
}

}  // namespace vqpu
