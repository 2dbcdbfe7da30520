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

#include "vqpu/circuit/wire.hpp"

#include <initializer_list>

#include "vqpu/error.hpp"

namespace vqpu {

using nlohmann::json;

namespace {

json param_to_json(const Param& p) {
    if (p.is_symbolic()) return json{{"param", p.symbol}};
    return p.value;
}

json instruction_to_json(const Instruction& inst) {
    json params = json::array();
    for (const auto& p : inst.params) params.push_back(param_to_json(p));
    json j{{"name", inst.name},
           {"qubits", inst.qubits},
           {"clbits", inst.clbits},
           {"params", params}};
    if (inst.remote) {
        json r{{"peer", inst.remote->peer},
               {"role", inst.remote->role == LinkRole::Sender ? "sender" : "receiver"},
               {"seq", inst.remote->seq}};
        if (inst.remote->gate) r["gate"] = *inst.remote->gate;
        j["remote"] = r;
    }
    if (inst.condition) {
        j["condition"] = {{"clbit", inst.condition->clbit}, {"value", inst.condition->value}};
    }
    return j;
}

[[noreturn]] void violation(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::SchemaViolation, path + ": " + what);
}

std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

void only_fields(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) violation(path.empty() ? "$" : path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) violation(join(path, key), "unknown field");
    }
}

const json& field(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) violation(join(path, key), "missing");
    return *it;
}

std::string get_string(const json& j, const std::string& path, const char* key) {
    const json& v = field(j, path, key);
    if (!v.is_string()) violation(join(path, key), "expected a string");
    return v.get<std::string>();
}

std::size_t get_index(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) violation(path, "expected a non-negative integer");
    return v.get<std::size_t>();
}

std::vector<std::size_t> get_indices(const json& j, const std::string& path, const char* key) {
    const json& v = field(j, path, key);
    const std::string p = join(path, key);
    if (!v.is_array()) violation(p, "expected an array");
    std::vector<std::size_t> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(get_index(v[i], p + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Param param_from_json(const json& v, const std::string& path) {
    if (v.is_number()) return Param(v.get<double>());
    if (v.is_object()) {
        only_fields(v, path, {"param"});
        std::string name = get_string(v, path, "param");
        if (name.empty()) violation(path + ".param", "empty name");
        return Param::named(std::move(name));
    }
    violation(path, "expected a number or {\"param\": name}");
}

Instruction instruction_from_json(const json& j, const std::string& path) {
    only_fields(j, path, {"name", "qubits", "clbits", "params", "remote", "condition"});
    Instruction inst;
    inst.name = get_string(j, path, "name");
    inst.qubits = get_indices(j, path, "qubits");
    inst.clbits = get_indices(j, path, "clbits");
    const json& params = field(j, path, "params");
    if (!params.is_array()) violation(path + ".params", "expected an array");
    for (std::size_t i = 0; i < params.size(); ++i) {
        inst.params.push_back(
            param_from_json(params[i], path + ".params[" + std::to_string(i) + "]"));
    }
    if (auto it = j.find("remote"); it != j.end()) {
        const std::string rp = path + ".remote";
        only_fields(*it, rp, {"peer", "role", "gate", "seq"});
        RemoteLink link;
        link.peer = get_string(*it, rp, "peer");
        const std::string role = get_string(*it, rp, "role");
        if (role == "sender") {
            link.role = LinkRole::Sender;
        } else if (role == "receiver") {
            link.role = LinkRole::Receiver;
        } else {
            violation(rp + ".role", "expected \"sender\" or \"receiver\"");
        }
        if (it->contains("gate")) link.gate = get_string(*it, rp, "gate");
        const json& seq = field(*it, rp, "seq");
        if (!seq.is_number_unsigned()) violation(rp + ".seq", "expected a non-negative integer");
        link.seq = seq.get<std::uint64_t>();
        inst.remote = std::move(link);
    }
    if (auto it = j.find("condition"); it != j.end()) {
        const std::string cp = path + ".condition";
        only_fields(*it, cp, {"clbit", "value"});
        Condition cond;
        cond.clbit = get_index(field(*it, cp, "clbit"), cp + ".clbit");
        const json& value = field(*it, cp, "value");
        if (!value.is_number_integer() || (value.get<int>() != 0 && value.get<int>() != 1)) {
            violation(cp + ".value", "expected 0 or 1");
        }
        cond.value = value.get<int>();
        inst.condition = cond;
    }
    return inst;
}

}  // namespace

json circuit_to_json(const Circuit& c) {
    json instructions = json::array();
    for (const auto& inst : c.instructions()) instructions.push_back(instruction_to_json(inst));
    return json{{"id", c.id()},
                {"num_qubits", c.num_qubits()},
                {"num_clbits", c.num_clbits()},
                {"instructions", instructions}};
}

Circuit circuit_from_json(const json& j) {
    only_fields(j, "", {"id", "num_qubits", "num_clbits", "instructions"});
    std::string id = get_string(j, "", "id");
    if (id.empty()) violation("id", "empty");
    const std::size_t nq = get_index(field(j, "", "num_qubits"), "num_qubits");
    if (nq == 0) violation("num_qubits", "must be at least 1");
    const std::size_t nc = get_index(field(j, "", "num_clbits"), "num_clbits");
    const json& list = field(j, "", "instructions");
    if (!list.is_array()) violation("instructions", "expected an array");
    Circuit c(nq, nc, std::move(id));
    for (std::size_t i = 0; i < list.size(); ++i) {
        c.append(instruction_from_json(list[i], "instructions[" + std::to_string(i) + "]"));
    }
    return c;
}

std::string to_wire(const Circuit& c) { return circuit_to_json(c).dump(); }

Circuit from_wire(std::string_view bytes) {
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        violation("$", std::string("not valid JSON: ") + e.what());
    }
    return circuit_from_json(j);
}

}  // namespace vqpu
