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

#include "vqpu/circuit/backend.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "vqpu/sim/gates.hpp"

namespace vqpu {

using nlohmann::json;

BackendSpec default_backend() {
    BackendSpec spec;
    for (const auto& g : supported_gates()) spec.basis_gates.emplace_back(g.name);
    return spec;
}

json backend_to_json(const BackendSpec& spec) {
    json j{{"name", spec.name},
           {"n_qubits", spec.n_qubits},
           {"basis_gates", spec.basis_gates},
           {"version", spec.version}};
    if (spec.coupling_map) {
        json cm = json::array();
        for (const auto& [a, b] : *spec.coupling_map) cm.push_back({a, b});
        j["coupling_map"] = cm;
    }
    return j;
}

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::SchemaViolation, path + ": " + what);
}

}  // namespace

BackendSpec backend_from_json(const json& j) {
    if (!j.is_object()) schema("$", "backend must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key != "name" && key != "n_qubits" && key != "basis_gates" && key != "coupling_map" &&
            key != "version") {
            schema(key, "unknown field");
        }
    }
    BackendSpec spec;
    if (!j.contains("name") || !j["name"].is_string()) schema("name", "required string");
    spec.name = j["name"].get<std::string>();
    if (!j.contains("n_qubits") || !j["n_qubits"].is_number_integer() ||
        j["n_qubits"].get<long long>() < 1) {
        schema("n_qubits", "required integer >= 1");
    }
    spec.n_qubits = j["n_qubits"].get<std::size_t>();
    if (!j.contains("basis_gates") || !j["basis_gates"].is_array()) {
        schema("basis_gates", "required array of gate names");
    }
    for (std::size_t i = 0; i < j["basis_gates"].size(); ++i) {
        const auto& g = j["basis_gates"][i];
        const std::string path = "basis_gates[" + std::to_string(i) + "]";
        if (!g.is_string()) schema(path, "gate names are strings");
        if (!is_engine_op(g.get<std::string>())) schema(path, "unsupported gate " + g.dump());
        spec.basis_gates.push_back(g.get<std::string>());
    }
    if (!j.contains("version") || !j["version"].is_string()) schema("version", "required string");
    spec.version = j["version"].get<std::string>();
    if (j.contains("coupling_map") && !j["coupling_map"].is_null()) {
        const auto& cm = j["coupling_map"];
        if (!cm.is_array()) schema("coupling_map", "array of [int, int] pairs");
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < cm.size(); ++i) {
            const auto& e = cm[i];
            const std::string path = "coupling_map[" + std::to_string(i) + "]";
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
                !e[1].is_number_unsigned()) {
                schema(path, "pair of non-negative integers");
            }
            pairs.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
        }
        spec.coupling_map = std::move(pairs);
    }
    return spec;
}

BackendSpec load_backend_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BackendFileInvalid, "cannot read " + path.string());
    try {
        return backend_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BackendFileInvalid, path.string() + ": " + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::BackendFileInvalid, path.string() + ": " + e.what());
    }
}

namespace {

class Validator {
public:
    Validator(const Circuit& c, const BackendSpec& b) : c_(c), b_(b) {}

    std::vector<Violation> run() {
        if (c_.num_qubits() > b_.n_qubits) {
            add(ErrorCode::WidthExceeded, std::to_string(c_.num_qubits()) +
                                              " qubits exceed backend '" + b_.name + "' with " +
                                              std::to_string(b_.n_qubits));
        }
        for (std::size_t i = 0; i < c_.size(); ++i) check(i, c_.instructions()[i]);
        if (open_) add(ErrorCode::MalformedRemote, "expose region is never closed");
        return std::move(out_);
    }

private:
    void add(ErrorCode code, std::string detail) { out_.push_back({code, std::move(detail)}); }

    std::string at(std::size_t i, const Instruction& inst) const {
        return "instructions[" + std::to_string(i) + "] (" + inst.name + ")";
    }

    bool in_basis(const std::string& name) const {
        return std::find(b_.basis_gates.begin(), b_.basis_gates.end(), name) !=
               b_.basis_gates.end();
    }

    void check_gate(std::size_t i, const Instruction& inst, const std::string& gate,
                    std::size_t expected_qubits_delta) {
        const GateSpec* spec = find_gate(gate);
        if (spec == nullptr) {
            add(ErrorCode::UnknownGate, at(i, inst) + ": unknown gate " + gate);
            return;
        }
        if (!in_basis(gate)) {
            add(ErrorCode::UnsupportedGate, at(i, inst) + ": " + gate + " not in basis of '" +
                                                b_.name + "'");
        }
        if (inst.qubits.size() + expected_qubits_delta != spec->num_qubits ||
            inst.params.size() != spec->num_params) {
            add(ErrorCode::ArityMismatch, at(i, inst));
        }
    }

    void check_qubits(std::size_t i, const Instruction& inst) {
        for (auto q : inst.qubits) {
            if (q >= c_.num_qubits()) {
                add(ErrorCode::QubitOutOfRange, at(i, inst) + ": qubit " + std::to_string(q));
            }
        }
        for (std::size_t a = 0; a < inst.qubits.size(); ++a) {
            for (std::size_t b = a + 1; b < inst.qubits.size(); ++b) {
                if (inst.qubits[a] == inst.qubits[b]) {
                    add(ErrorCode::ArityMismatch, at(i, inst) + ": repeated qubit");
                }
            }
        }
    }

    void check_remote(std::size_t i, const Instruction& inst, LinkRole expected_role) {
        if (!inst.remote) {
            add(ErrorCode::MalformedRemote, at(i, inst) + ": missing remote link");
            return;
        }
        const auto& r = *inst.remote;
        if (r.peer.empty()) add(ErrorCode::MalformedRemote, at(i, inst) + ": empty peer");
        if (r.peer == c_.id()) add(ErrorCode::SelfLink, at(i, inst) + ": links to itself");
        if (r.role != expected_role) add(ErrorCode::MalformedRemote, at(i, inst) + ": wrong role");
        if (inst.name != op::kRemoteCIf && r.gate) {
            add(ErrorCode::MalformedRemote, at(i, inst) + ": gate only valid on remote_c_if");
        }
        if (inst.name == op::kExposeEnd) return;
        auto& expected = next_seq_[{inst.name, r.peer}];
        if (r.seq != expected) {
            add(ErrorCode::MalformedRemote, at(i, inst) + ": sequence tag " +
                                                std::to_string(r.seq) + ", expected " +
                                                std::to_string(expected));
        }
        expected = r.seq + 1;
    }

    void check(std::size_t i, const Instruction& inst) {
        if (inst.condition && inst.condition->clbit >= c_.num_clbits()) {
            add(ErrorCode::DanglingClbit, at(i, inst) + ": condition on clbit " +
                                              std::to_string(inst.condition->clbit));
        }
        if (inst.condition && inst.condition->value != 0 && inst.condition->value != 1) {
            add(ErrorCode::MalformedRemote, at(i, inst) + ": condition value must be 0 or 1");
        }
        if (open_) {
            check_in_region(i, inst);
            return;
        }
        if (!is_distributed_name(inst.name) && inst.remote) {
            add(ErrorCode::MalformedRemote, at(i, inst) + ": local instruction with remote link");
        }
        if (is_distributed_name(inst.name) && inst.condition) {
            add(ErrorCode::NotSupported, at(i, inst) + ": conditioned distributed instruction");
        }
        check_qubits(i, inst);
        if (inst.name == op::kMeasure) {
            if (inst.qubits.size() != 1 || inst.clbits.size() != 1) {
                add(ErrorCode::ArityMismatch, at(i, inst));
            }
            for (auto cb : inst.clbits) {
                if (cb >= c_.num_clbits()) {
                    add(ErrorCode::DanglingClbit, at(i, inst) + ": clbit " + std::to_string(cb));
                }
            }
            return;
        }
        if (!inst.clbits.empty()) {
            add(ErrorCode::DanglingClbit, at(i, inst) + ": only measure writes clbits");
        }
        if (inst.name == op::kReset || inst.name == op::kMeasureAndSend ||
            inst.name == op::kQsend || inst.name == op::kQrecv ||
            inst.name == op::kExposeBegin || inst.name == op::kExposeEnd) {
            if (inst.qubits.size() != 1 || !inst.params.empty()) {
                add(ErrorCode::ArityMismatch, at(i, inst));
            }
        }
        if (inst.name == op::kReset) return;
        if (inst.name == op::kMeasureAndSend || inst.name == op::kQsend) {
            check_remote(i, inst, LinkRole::Sender);
            return;
        }
        if (inst.name == op::kQrecv) {
            check_remote(i, inst, LinkRole::Receiver);
            return;
        }
        if (inst.name == op::kRemoteCIf) {
            check_remote(i, inst, LinkRole::Receiver);
            if (!inst.remote || !inst.remote->gate) {
                add(ErrorCode::MalformedRemote, at(i, inst) + ": missing gate name");
            } else {
                check_gate(i, inst, *inst.remote->gate, 0);
            }
            return;
        }
        if (inst.name == op::kExposeBegin) {
            check_remote(i, inst, LinkRole::Sender);
            open_ = true;
            open_index_ = i;
            body_size_ = 0;
            return;
        }
        if (inst.name == op::kExposeEnd) {
            add(ErrorCode::MalformedRemote, at(i, inst) + ": expose_end without expose_begin");
            return;
        }
        check_gate(i, inst, inst.name, 0);
    }

    void check_in_region(std::size_t i, const Instruction& inst) {
        const Instruction& begin = c_.instructions()[open_index_];
        if (inst.name == op::kExposeEnd) {
            open_ = false;
            if (body_size_ == 0) add(ErrorCode::EmptyBody, at(i, inst) + ": empty expose region");
            check_remote(i, inst, LinkRole::Sender);
            if (inst.remote && begin.remote &&
                (inst.remote->peer != begin.remote->peer || inst.remote->seq != begin.remote->seq)) {
                add(ErrorCode::MalformedRemote, at(i, inst) + ": does not match its expose_begin");
            }
            if (inst.qubits != begin.qubits) {
                add(ErrorCode::MalformedRemote, at(i, inst) + ": exposed qubit changed");
            }
            return;
        }
        ++body_size_;
        if (is_distributed_name(inst.name) || inst.remote) {
            add(ErrorCode::NotSupported,
                at(i, inst) + ": expose regions cannot nest or hold distributed instructions");
            return;
        }
        if (inst.condition) {
            add(ErrorCode::NotSupported, at(i, inst) + ": conditioned gate inside expose");
        }
        const GateSpec* spec = find_gate(inst.name);
        if (spec == nullptr) {
            add(ErrorCode::UnknownGate, at(i, inst));
            return;
        }
        if (spec->shape != GateShape::Controlled) {
            add(ErrorCode::NotSupported, at(i, inst) + ": expose body gates must be controlled");
            return;
        }
        // The exposed qubit is the control, so one qubit fewer is listed.
        check_gate(i, inst, inst.name, 1);
    }

    const Circuit& c_;
    const BackendSpec& b_;
    std::vector<Violation> out_;
    std::map<std::pair<std::string, std::string>, std::uint64_t> next_seq_;
    bool open_ = false;
    std::size_t open_index_ = 0;
    std::size_t body_size_ = 0;
};

}  // namespace

std::vector<Violation> validate(const Circuit& circuit, const BackendSpec& backend) {
    try {
        return Validator(circuit, backend).run();
    } catch (const std::exception& e) {
        return {{ErrorCode::Internal, e.what()}};
    }
}

std::string describe(const std::vector<Violation>& violations) {
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i > 0) out << "; ";
        out << error_code_name(violations[i].code) << "(" << violations[i].detail << ")";
    }
    return out.str();
}

}  // namespace vqpu
