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

#include "vqpu/sim/state_vector.hpp"

#include <bit>
#include <cmath>

#include "vqpu/error.hpp"

namespace vqpu {

StateVector::StateVector(std::size_t num_qubits)
    : num_qubits_(num_qubits), amps_(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0}) {
    if (num_qubits == 0 || num_qubits > 40) {
        throw Error(ErrorCode::WidthExceeded, "cannot allocate " + std::to_string(num_qubits) +
                                                  " qubits");
    }
    amps_[0] = 1.0;
}

StateVector::StateVector(std::vector<Amplitude> amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 2 || !std::has_single_bit(amps_.size())) {
        throw Error(ErrorCode::InvalidArgument, "amplitude count must be a power of two >= 2");
    }
    num_qubits_ = static_cast<std::size_t>(std::countr_zero(amps_.size()));
}

double StateVector::norm_squared() const {
    double sum = 0.0;
    for (const auto& a : amps_) sum += std::norm(a);
    return sum;
}

void StateVector::apply_single(const Matrix2& m, std::size_t target) {
    const std::size_t stride = std::size_t{1} << target;
    const std::size_t dim = amps_.size();
    const bool diagonal = m[1] == Amplitude{} && m[2] == Amplitude{};
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            Amplitude& a0 = amps_[i];
            Amplitude& a1 = amps_[i + stride];
            if (diagonal) {
                a0 *= m[0];
                a1 *= m[3];
            } else {
                const Amplitude v0 = a0, v1 = a1;
                a0 = m[0] * v0 + m[1] * v1;
                a1 = m[2] * v0 + m[3] * v1;
            }
        }
    }
}

void StateVector::apply_controlled(const Matrix2& m, std::size_t control, std::size_t target) {
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    const std::size_t dim = amps_.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) == 0 || (i & tmask) != 0) continue;
        const Amplitude v0 = amps_[i], v1 = amps_[i | tmask];
        amps_[i] = m[0] * v0 + m[1] * v1;
        amps_[i | tmask] = m[2] * v0 + m[3] * v1;
    }
}

void StateVector::apply_swap(std::size_t a, std::size_t b) {
    const std::size_t am = std::size_t{1} << a;
    const std::size_t bm = std::size_t{1} << b;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & am) != 0 && (i & bm) == 0) std::swap(amps_[i], amps_[(i & ~am) | bm]);
    }
}

double StateVector::probability_of_one(std::size_t qubit) const {
    const std::size_t stride = std::size_t{1} << qubit;
    double p = 0.0;
    for (std::size_t base = stride; base < amps_.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) p += std::norm(amps_[i]);
    }
    return p;
}

void StateVector::project(std::size_t qubit, int bit, double prob) {
    if (!(prob > 1e-300)) {
        throw Error(ErrorCode::ZeroNorm, "collapse of qubit " + std::to_string(qubit) +
                                             " onto a zero-probability outcome");
    }
    const double scale = 1.0 / std::sqrt(prob);
    const std::size_t mask = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const bool one = (i & mask) != 0;
        if (one == (bit == 1)) {
            amps_[i] *= scale;
        } else {
            amps_[i] = 0.0;
        }
    }
}

namespace {

void check_range(const StateVector& state, std::size_t q) {
    if (q >= state.num_qubits()) {
        throw Error(ErrorCode::QubitOutOfRange, "qubit " + std::to_string(q) + " >= width " +
                                                    std::to_string(state.num_qubits()));
    }
}

}  // namespace

void apply_gate(StateVector& state, const GateOp& op) {
    const GateSpec* spec = find_gate(op.name);
    if (spec == nullptr) throw Error(ErrorCode::UnknownGate, op.name);
    if (op.qubits.size() != spec->num_qubits || op.params.size() != spec->num_params) {
        throw Error(ErrorCode::ArityMismatch, op.name);
    }
    for (auto q : op.qubits) check_range(state, q);
    if (spec->num_qubits == 2 && op.qubits[0] == op.qubits[1]) {
        throw Error(ErrorCode::InvalidArgument, op.name + " on a repeated qubit");
    }
    switch (spec->shape) {
        case GateShape::Single:
            state.apply_single(gate_matrix(*spec, op.params), op.qubits[0]);
            break;
        case GateShape::Controlled:
            state.apply_controlled(gate_matrix(*spec, op.params), op.qubits[0], op.qubits[1]);
            break;
        case GateShape::Swap:
            state.apply_swap(op.qubits[0], op.qubits[1]);
            break;
    }
}

int measure_qubit(StateVector& state, std::size_t qubit, ShotRng& rng) {
    check_range(state, qubit);
    const double p1 = state.probability_of_one(qubit);
    const int bit = rng.uniform() < p1 ? 1 : 0;
    state.project(qubit, bit, bit == 1 ? p1 : 1.0 - p1);
    return bit;
}

void reset_qubit(StateVector& state, std::size_t qubit, ShotRng& rng) {
    if (measure_qubit(state, qubit, rng) == 1) {
        state.apply_single({0.0, 1.0, 1.0, 0.0}, qubit);
    }
}

}  // namespace vqpu
