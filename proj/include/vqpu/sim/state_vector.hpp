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
#include <span>
#include <string>
#include <vector>

#include "vqpu/circuit/circuit.hpp"
#include "vqpu/sim/gates.hpp"
#include "vqpu/sim/rng.hpp"

namespace vqpu {

/// Dense amplitude vector over n qubits. Qubit k is bit k of the basis
/// index (little-endian).
class StateVector {
public:
    /// |0...0>.
    explicit StateVector(std::size_t num_qubits);
    /// Takes ownership of amplitudes; size must be a power of two >= 2.
    explicit StateVector(std::vector<Amplitude> amplitudes);

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dimension() const { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    const Amplitude& operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const;

    void apply_single(const Matrix2& m, std::size_t target);
    void apply_controlled(const Matrix2& m, std::size_t control, std::size_t target);
    void apply_swap(std::size_t a, std::size_t b);

    double probability_of_one(std::size_t qubit) const;

    /// Projects qubit onto |bit> and renormalizes by 1/sqrt(prob).
    void project(std::size_t qubit, int bit, double prob);

private:
    std::size_t num_qubits_;
    std::vector<Amplitude> amps_;
};

/// A single resolved unitary application.
struct GateOp {
    std::string name;
    std::vector<std::size_t> qubits;
    std::vector<std::size_t> clbits;
    std::vector<double> params;
    std::optional<Condition> condition;
};

/// Applies a unitary GateOp in place. Conditions must already be resolved.
void apply_gate(StateVector& state, const GateOp& op);

/// Samples the qubit in the computational basis, collapses the state and
/// returns the outcome.
int measure_qubit(StateVector& state, std::size_t qubit, ShotRng& rng);

/// Measures, then flips the qubit back to |0> when the outcome was 1.
void reset_qubit(StateVector& state, std::size_t qubit, ShotRng& rng);

}  // namespace vqpu
