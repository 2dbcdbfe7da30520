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
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vqpu/circuit/circuit.hpp"
#include "vqpu/error.hpp"

namespace vqpu {

struct BackendSpec {
    std::string name = "default";
    std::size_t n_qubits = 32;
    std::vector<std::string> basis_gates;
    std::optional<std::vector<std::pair<std::size_t, std::size_t>>> coupling_map;
    std::string version = "1.0.0";

    friend bool operator==(const BackendSpec&, const BackendSpec&) = default;
};

/// Noiseless 32-qubit backend accepting every engine gate.
BackendSpec default_backend();

nlohmann::json backend_to_json(const BackendSpec& spec);
/// Strict: unknown fields and unsupported basis gates are SchemaViolation.
BackendSpec backend_from_json(const nlohmann::json& j);
/// Throws BackendFileInvalid on unreadable or malformed files.
BackendSpec load_backend_file(const std::filesystem::path& path);

struct Violation {
    ErrorCode code;
    std::string detail;
};

/// Every problem that keeps `circuit` from running on `backend`. Never
/// throws; an empty list means the circuit is admissible.
std::vector<Violation> validate(const Circuit& circuit, const BackendSpec& backend);

std::string describe(const std::vector<Violation>& violations);

}  // namespace vqpu
