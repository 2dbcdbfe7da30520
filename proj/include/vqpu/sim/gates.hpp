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

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace vqpu {

using Amplitude = std::complex<double>;

/// Row-major 2x2 matrix {m00, m01, m10, m11}.
using Matrix2 = std::array<Amplitude, 4>;

enum class GateShape {
    Single,      // 2x2 on qubits[0]
    Controlled,  // control qubits[0], 2x2 target action on qubits[1]
    Swap,
};

struct GateSpec {
    std::string_view name;
    std::size_t num_qubits;
    std::size_t num_params;
    GateShape shape;
};

/// Unitary gates the engine executes (measure/reset are handled separately).
std::span<const GateSpec> supported_gates();

/// nullptr when the name is not a supported unitary.
const GateSpec* find_gate(std::string_view name);

/// True for names that are accepted in circuits: unitaries plus measure/reset.
bool is_engine_op(std::string_view name);

/// The 2x2 action of a single-qubit gate, or the target action of a
/// controlled gate. rz(l) = diag(e^{-il/2}, e^{il/2}); cp's target action
/// is diag(1, e^{il}).
Matrix2 gate_matrix(const GateSpec& spec, std::span<const double> params);

}  // namespace vqpu
