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
#include <optional>
#include <string_view>
#include <utility>

#include "vqpu/circuit/circuit.hpp"

namespace vqpu {

/// a's instructions followed by b's. Widths must match; clbits = max.
Circuit concat(const Circuit& a, const Circuit& b);
inline Circuit operator+(const Circuit& a, const Circuit& b) { return concat(a, b); }

/// Stacks b below a: b's qubit and clbit indices are offset by a's counts.
Circuit tensor_union(const Circuit& a, const Circuit& b);
inline Circuit operator|(const Circuit& a, const Circuit& b) { return tensor_union(a, b); }

/// Cuts after qubit `after_qubit`: qubits [0, after_qubit] go to the first
/// part. Clbits [0, after_clbit] go to the first part; when omitted the
/// boundary is the largest clbit the first part touches.
std::pair<Circuit, Circuit> hor_split(const Circuit& c, std::size_t after_qubit,
                                      std::optional<std::size_t> after_clbit = std::nullopt);

/// Instructions [0, after_position) and [after_position, end).
std::pair<Circuit, Circuit> vert_split(const Circuit& c, std::size_t after_position);

/// Length of the layered schedule; every instruction occupies one layer on
/// each of its local qubits. Expose body markers sit on the exposed qubit.
std::size_t depth(const Circuit& c);

/// Membership over instruction names, including remote_c_if gate names.
bool contains(const Circuit& c, std::string_view gate);

}  // namespace vqpu
