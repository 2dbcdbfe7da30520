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

#include "vqpu/sim/gates.hpp"

#include <cmath>
#include <numbers>

#include "vqpu/error.hpp"

namespace vqpu {
namespace {

constexpr std::array<GateSpec, 19> kGates{{
    {"id", 1, 0, GateShape::Single},
    {"x", 1, 0, GateShape::Single},
    {"y", 1, 0, GateShape::Single},
    {"z", 1, 0, GateShape::Single},
    {"h", 1, 0, GateShape::Single},
    {"s", 1, 0, GateShape::Single},
    {"sdg", 1, 0, GateShape::Single},
    {"t", 1, 0, GateShape::Single},
    {"tdg", 1, 0, GateShape::Single},
    {"rx", 1, 1, GateShape::Single},
    {"ry", 1, 1, GateShape::Single},
    {"rz", 1, 1, GateShape::Single},
    {"u", 1, 3, GateShape::Single},
    {"cx", 2, 0, GateShape::Controlled},
    {"cy", 2, 0, GateShape::Controlled},
    {"cz", 2, 0, GateShape::Controlled},
    {"crz", 2, 1, GateShape::Controlled},
    {"cp", 2, 1, GateShape::Controlled},
    {"swap", 2, 0, GateShape::Swap},
}};

constexpr Amplitude kI{0.0, 1.0};

}  // namespace

std::span<const GateSpec> supported_gates() { return kGates; }

const GateSpec* find_gate(std::string_view name) {
    for (const auto& g : kGates) {
        if (g.name == name) return &g;
    }
    return nullptr;
}

bool is_engine_op(std::string_view name) {
    return find_gate(name) != nullptr || name == "measure" || name == "reset";
}

Matrix2 gate_matrix(const GateSpec& spec, std::span<const double> params) {
    if (params.size() != spec.num_params) {
        throw Error(ErrorCode::ArityMismatch,
                    std::string(spec.name) + " expects " + std::to_string(spec.num_params) +
                        " params, got " + std::to_string(params.size()));
    }
    const std::string_view n = spec.name;
    const double r = std::numbers::sqrt2 / 2.0;
    if (n == "id") return {1.0, 0.0, 0.0, 1.0};
    if (n == "x" || n == "cx") return {0.0, 1.0, 1.0, 0.0};
    if (n == "y" || n == "cy") return {0.0, -kI, kI, 0.0};
    if (n == "z" || n == "cz") return {1.0, 0.0, 0.0, -1.0};
    if (n == "h") return {r, r, r, -r};
    if (n == "s") return {1.0, 0.0, 0.0, kI};
    if (n == "sdg") return {1.0, 0.0, 0.0, -kI};
    if (n == "t") return {1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4)};
    if (n == "tdg") return {1.0, 0.0, 0.0, std::polar(1.0, -std::numbers::pi / 4)};
    if (n == "rx") {
        const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
        return {c, -kI * s, -kI * s, c};
    }
    if (n == "ry") {
        const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
        return {c, -s, s, c};
    }
    if (n == "rz" || n == "crz") {
        return {std::polar(1.0, -params[0] / 2), 0.0, 0.0, std::polar(1.0, params[0] / 2)};
    }
    if (n == "cp") return {1.0, 0.0, 0.0, std::polar(1.0, params[0])};
    if (n == "u") {
        const double theta = params[0], phi = params[1], lambda = params[2];
        const double c = std::cos(theta / 2), s = std::sin(theta / 2);
        return {c, -std::polar(s, lambda), std::polar(s, phi), std::polar(c, phi + lambda)};
    }
    throw Error(ErrorCode::UnknownGate, std::string(n));
}

}  // namespace vqpu
