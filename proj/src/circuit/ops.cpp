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

#include "vqpu/circuit/ops.hpp"

#include <algorithm>
#include <vector>

#include "vqpu/error.hpp"

namespace vqpu {

Circuit concat(const Circuit& a, const Circuit& b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw Error(ErrorCode::WidthMismatch, "concat of widths " + std::to_string(a.num_qubits()) +
                                                  " and " + std::to_string(b.num_qubits()));
    }
    Circuit out(a.num_qubits(), std::max(a.num_clbits(), b.num_clbits()));
    for (const auto& inst : a.instructions()) out.append(inst);
    for (const auto& inst : b.instructions()) out.append(inst);
    renumber_links(out);
    return out;
}

Circuit tensor_union(const Circuit& a, const Circuit& b) {
    Circuit out(a.num_qubits() + b.num_qubits(), a.num_clbits() + b.num_clbits());
    for (const auto& inst : a.instructions()) out.append(inst);
    const std::size_t qoff = a.num_qubits();
    const std::size_t coff = a.num_clbits();
    bool in_expose = false;
    for (auto inst : b.instructions()) {
        // Expose body markers address the peer circuit, not this one.
        if (!in_expose) {
            for (auto& q : inst.qubits) q += qoff;
        } else if (inst.name == op::kExposeEnd) {
            for (auto& q : inst.qubits) q += qoff;
        }
        for (auto& c : inst.clbits) c += coff;
        if (inst.condition) inst.condition->clbit += coff;
        if (inst.name == op::kExposeBegin) in_expose = true;
        if (inst.name == op::kExposeEnd) in_expose = false;
        out.append(std::move(inst));
    }
    renumber_links(out);
    return out;
}

std::pair<Circuit, Circuit> hor_split(const Circuit& c, std::size_t after_qubit,
                                      std::optional<std::size_t> after_clbit) {
    if (after_qubit + 1 >= c.num_qubits()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "hor_split after qubit " + std::to_string(after_qubit) + " of a " +
                        std::to_string(c.num_qubits()) + "-qubit circuit leaves no lower part");
    }
    const auto top_qubit = [&](std::size_t q) { return q <= after_qubit; };

    // Classify instructions and find the clbit boundary.
    std::vector<bool> goes_top;
    goes_top.reserve(c.size());
    std::optional<std::size_t> top_max_clbit;
    bool in_expose = false;
    bool expose_top = false;
    for (const auto& inst : c.instructions()) {
        bool top;
        if (in_expose && inst.name != op::kExposeEnd) {
            top = expose_top;
        } else {
            if (inst.qubits.empty()) {
                throw Error(ErrorCode::StraddlingGate, inst.name + " has no qubits");
            }
            top = top_qubit(inst.qubits.front());
            for (auto q : inst.qubits) {
                if (top_qubit(q) != top) {
                    throw Error(ErrorCode::StraddlingGate,
                                inst.name + " straddles the cut after qubit " +
                                    std::to_string(after_qubit));
                }
            }
        }
        if (inst.name == op::kExposeBegin) {
            in_expose = true;
            expose_top = top;
        } else if (inst.name == op::kExposeEnd) {
            in_expose = false;
        }
        goes_top.push_back(top);
        if (top) {
            for (auto cb : inst.clbits) top_max_clbit = std::max(top_max_clbit.value_or(0), cb);
            if (inst.condition) {
                top_max_clbit = std::max(top_max_clbit.value_or(0), inst.condition->clbit);
            }
        }
    }
    std::size_t top_clbits = 0;
    if (after_clbit) {
        if (*after_clbit >= c.num_clbits()) {
            throw Error(ErrorCode::IndexOutOfRange, "clbit boundary beyond declared clbits");
        }
        top_clbits = *after_clbit + 1;
    } else if (top_max_clbit) {
        top_clbits = *top_max_clbit + 1;
    }

    Circuit top(after_qubit + 1, top_clbits);
    Circuit bottom(c.num_qubits() - after_qubit - 1, c.num_clbits() - top_clbits);
    const std::size_t qoff = after_qubit + 1;
    in_expose = false;
    for (std::size_t i = 0; i < c.size(); ++i) {
        Instruction inst = c.instructions()[i];
        const bool body = in_expose && inst.name != op::kExposeEnd;
        if (inst.name == op::kExposeBegin) in_expose = true;
        if (inst.name == op::kExposeEnd) in_expose = false;
        auto check_clbit = [&](std::size_t cb) {
            if ((cb < top_clbits) != goes_top[i]) {
                throw Error(ErrorCode::StraddlingGate,
                            inst.name + " uses clbit " + std::to_string(cb) +
                                " on the other side of the cut");
            }
        };
        for (auto cb : inst.clbits) check_clbit(cb);
        if (inst.condition) check_clbit(inst.condition->clbit);
        if (goes_top[i]) {
            top.append(std::move(inst));
            continue;
        }
        if (!body) {
            for (auto& q : inst.qubits) q -= qoff;
        }
        for (auto& cb : inst.clbits) cb -= top_clbits;
        if (inst.condition) inst.condition->clbit -= top_clbits;
        bottom.append(std::move(inst));
    }
    renumber_links(top);
    renumber_links(bottom);
    return {std::move(top), std::move(bottom)};
}

std::pair<Circuit, Circuit> vert_split(const Circuit& c, std::size_t after_position) {
    if (after_position > c.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "vert_split position " +
                                                    std::to_string(after_position) + " > " +
                                                    std::to_string(c.size()));
    }
    // Do not cut through an expose region.
    bool in_expose = false;
    for (std::size_t i = 0; i < after_position; ++i) {
        const auto& n = c.instructions()[i].name;
        if (n == op::kExposeBegin) in_expose = true;
        if (n == op::kExposeEnd) in_expose = false;
    }
    if (in_expose) {
        throw Error(ErrorCode::StraddlingGate, "vert_split inside an expose region");
    }
    Circuit first(c.num_qubits(), c.num_clbits());
    Circuit second(c.num_qubits(), c.num_clbits());
    for (std::size_t i = 0; i < c.size(); ++i) {
        (i < after_position ? first : second).append(c.instructions()[i]);
    }
    renumber_links(first);
    renumber_links(second);
    return {std::move(first), std::move(second)};
}

std::size_t depth(const Circuit& c) {
    std::vector<std::size_t> level(c.num_qubits(), 0);
    std::size_t deepest = 0;
    std::optional<std::size_t> exposed;
    for (const auto& inst : c.instructions()) {
        std::vector<std::size_t> local;
        if (exposed && inst.name != op::kExposeEnd) {
            local.push_back(*exposed);
        } else {
            local = inst.qubits;
        }
        if (inst.name == op::kExposeBegin && !inst.qubits.empty()) exposed = inst.qubits.front();
        if (inst.name == op::kExposeEnd) exposed.reset();

        std::size_t l = 0;
        for (auto q : local) {
            if (q < level.size()) l = std::max(l, level[q]);
        }
        ++l;
        for (auto q : local) {
            if (q < level.size()) level[q] = l;
        }
        deepest = std::max(deepest, l);
    }
    return deepest;
}

bool contains(const Circuit& c, std::string_view gate) {
    return std::any_of(c.instructions().begin(), c.instructions().end(),
                       [&](const Instruction& inst) {
                           if (inst.name == gate) return true;
                           return inst.remote && inst.remote->gate && *inst.remote->gate == gate;
                       });
}

}  // namespace vqpu
