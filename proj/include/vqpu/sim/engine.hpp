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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vqpu/circuit/circuit.hpp"
#include "vqpu/sim/state_vector.hpp"

namespace vqpu {

/// Bit-string -> occurrences. Keys print classical bit 0 rightmost.
using Counts = std::map<std::string, std::uint64_t>;

struct EngineConfig {
    /// Largest statevector the engine will allocate.
    std::size_t max_qubits = 26;
};

/// Callbacks that connect the shot loop to a classical channel. Both must
/// be set when the circuit holds measure_and_send / remote_c_if.
struct ChannelHooks {
    std::function<void(const std::string& peer, std::uint64_t shot, std::uint64_t seq, int bit)>
        send;
    std::function<int(const std::string& peer, std::uint64_t shot, std::uint64_t seq)> recv;
};

/// Final classical bits and state of one shot.
struct ShotRecord {
    std::uint64_t shot_index = 0;
    std::vector<int> classical_bits;
};

std::string bits_to_key(std::span<const int> bits);

std::uint64_t total_shots(const Counts& counts);

/// True when the circuit can be executed by evolving once and sampling the
/// terminal measurement distribution.
bool is_sampling_admissible(const Circuit& circuit);

/// Fast path: one unitary evolution, then `shots` samples of the terminal
/// measurements from a single random stream of `seed`.
Counts run_sampled(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed,
                   const EngineConfig& config = {});

/// Per-shot instruction loop with mid-circuit measurement, reset, local
/// conditions and channel hooks. Shot i draws from stream (seed, i).
Counts run_shot_loop(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed,
                     const ChannelHooks& hooks = {}, const EngineConfig& config = {});

/// Runs shot `shot_index` alone and returns its record together with the
/// final statevector. Same stream as the matching run_shot_loop shot.
ShotRecord run_single_shot(const Circuit& circuit, std::uint64_t seed, std::uint64_t shot_index,
                           StateVector* final_state = nullptr, const ChannelHooks& hooks = {},
                           const EngineConfig& config = {});

/// Applies every unitary of a measurement-free, condition-free circuit to
/// |0...0> and returns the resulting state.
StateVector simulate_statevector(const Circuit& circuit, const EngineConfig& config = {});

}  // namespace vqpu
