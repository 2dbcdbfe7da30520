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

#include <string>
#include <string_view>

#include <json.hpp>

#include "vqpu/circuit/circuit.hpp"

namespace vqpu {

/// JSON object form of a circuit. Params are numbers or {"param": name};
/// locally conditioned gates carry "condition": {"clbit", "value"}.
nlohmann::json circuit_to_json(const Circuit& c);

/// Strict inverse of circuit_to_json. Unknown fields, wrong types and
/// missing fields throw SchemaViolation whose detail starts with the field
/// path, e.g. "instructions[3].qubits".
Circuit circuit_from_json(const nlohmann::json& j);

/// UTF-8 JSON text.
std::string to_wire(const Circuit& c);
Circuit from_wire(std::string_view bytes);

}  // namespace vqpu
