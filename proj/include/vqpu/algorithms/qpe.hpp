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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vqpu/circuit/circuit.hpp"
#include "vqpu/sim/engine.hpp"

namespace vqpu {

/// Phase estimation of U = Rz(2*theta) on its |1> eigenstate, whose phase
/// is phi = theta / (2 pi) mod 1.
struct QpeConfig {
    std::size_t n_ancilla = 1;
    /// Width of the target register. U acts on target qubit 0.
    std::size_t target_qubits = 1;
    double theta = 0.0;
    std::uint64_t shots = 1024;
    /// Prepare the |1> eigenstate with an X gate.
    bool eigenstate = true;
};

struct PhaseEstimate {
    std::uint64_t xi = 0;
    std::size_t n = 0;
    double phi_hat = 0.0;
    double error_bound = 0.0;
};

/// theta / (2 pi) reduced to [0, 1).
double true_phase(double theta);

/// Inverse QFT on qubits [first, first + n): swaps, then the H /
/// controlled-phase ladder with cp(-pi / 2^k).
void append_inverse_qft(Circuit& c, std::size_t first, std::size_t n);

/// Ancilla t controls crz(2 theta 2^t) and is measured into clbit t, so xi
/// reads little-endian. Throws WidthExceeded beyond the engine cap.
Circuit build_qpe(const QpeConfig& cfg, const EngineConfig& engine = {});

struct IpeaChain {
    std::vector<Circuit> circuits;
    /// bit_flow[i] lists the circuits that receive circuit i's bit.
    std::vector<std::vector<std::size_t>> bit_flow;
};

/// Circuit i (width 1 + m, one clbit) applies U^(2^(n-i-1)), corrects with
/// remote_c_if rotations rz(-pi / 2^(i-j)) from every j < i, measures, and
/// sends its bit to every j > i. Ids are prefix + "_" + i.
IpeaChain build_ipea_chain(const QpeConfig& cfg, const std::string& prefix = "ipea",
                           const EngineConfig& engine = {});

/// (ancilla circuit with n qubits and n clbits, target circuit with m
/// qubits). Each controlled power is an expose region on the target.
/// Throws WidthExceeded when n + m + 2 exceeds the engine cap.
std::pair<Circuit, Circuit> build_distributed_qpe(const QpeConfig& cfg,
                                                  const std::string& control_id = "qpe_control",
                                                  const std::string& target_id = "qpe_target",
                                                  const EngineConfig& engine = {});

/// xi is the little-endian value of the most frequent n-bit ancilla
/// substring (the rightmost n characters of each key); ties go to the
/// smaller xi. Throws EmptyCounts, LengthMismatch.
PhaseEstimate extract_phase(const Counts& counts, std::size_t n);

/// xi = sum_i bits[i] 2^i. Throws LengthMismatch when bits.size() != n.
PhaseEstimate ipea_bits_to_phase(const std::vector<int>& bits, std::size_t n);

/// Majority value of clbit `clbit` across counts; ties give 0.
int most_frequent_bit(const Counts& counts, std::size_t clbit = 0);

}  // namespace vqpu
