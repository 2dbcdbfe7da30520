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

#include "vqpu/algorithms/qpe.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "vqpu/error.hpp"

namespace vqpu {

namespace {

constexpr double kPi = std::numbers::pi;

void check_width(std::size_t width, const EngineConfig& engine, const char* what) {
    if (width > engine.max_qubits) {
        throw Error(ErrorCode::WidthExceeded, std::string(what) + " needs " + std::to_string(width) +
                                                  " qubits, engine cap is " +
                                                  std::to_string(engine.max_qubits));
    }
}

void check_config(const QpeConfig& cfg) {
    if (cfg.n_ancilla < 1 || cfg.target_qubits < 1) {
        throw Error(ErrorCode::InvalidArgument, "phase estimation needs n >= 1 and m >= 1");
    }
    if (cfg.n_ancilla > 62) throw Error(ErrorCode::InvalidArgument, "n_ancilla above 62");
}

double power_angle(double theta, std::size_t power) {
    return 2.0 * theta * std::ldexp(1.0, static_cast<int>(power));
}

}  // namespace

double true_phase(double theta) {
    double phi = std::fmod(theta / (2 * kPi), 1.0);
    if (phi < 0) phi += 1.0;
    return phi;
}

void append_inverse_qft(Circuit& c, std::size_t first, std::size_t n) {
    for (std::size_t i = 0; i < n / 2; ++i) c.swap(first + i, first + n - 1 - i);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            c.cp(-kPi / std::ldexp(1.0, static_cast<int>(j - k)), first + k, first + j);
        }
        c.h(first + j);
    }
}

Circuit build_qpe(const QpeConfig& cfg, const EngineConfig& engine) {
    check_config(cfg);
    const std::size_t n = cfg.n_ancilla;
    check_width(n + cfg.target_qubits, engine, "QPE");
    Circuit c(n + cfg.target_qubits, n);
    const std::size_t target = n;
    for (std::size_t t = 0; t < n; ++t) c.h(t);
    if (cfg.eigenstate) c.x(target);
    for (std::size_t t = 0; t < n; ++t) c.crz(power_angle(cfg.theta, t), t, target);
    append_inverse_qft(c, 0, n);
    for (std::size_t t = 0; t < n; ++t) c.measure(t, t);
    return c;
}

IpeaChain build_ipea_chain(const QpeConfig& cfg, const std::string& prefix,
                           const EngineConfig& engine) {
    check_config(cfg);
    const std::size_t n = cfg.n_ancilla;
    check_width(1 + cfg.target_qubits, engine, "IPEA step");
    auto id = [&](std::size_t i) { return prefix + "_" + std::to_string(i); };
    IpeaChain chain;
    for (std::size_t i = 0; i < n; ++i) {
        Circuit c(1 + cfg.target_qubits, 1, id(i));
        c.h(0);
        if (cfg.eigenstate) c.x(1);
        c.crz(power_angle(cfg.theta, n - i - 1), 0, 1);
        for (std::size_t j = 0; j < i; ++j) {
            c.remote_c_if("rz", {0}, id(j), {Param(-kPi / std::ldexp(1.0, static_cast<int>(i - j)))});
        }
        c.h(0);
        c.measure(0, 0);
        std::vector<std::size_t> flow;
        for (std::size_t j = i + 1; j < n; ++j) {
            c.measure_and_send(0, id(j));
            flow.push_back(j);
        }
        chain.circuits.push_back(std::move(c));
        chain.bit_flow.push_back(std::move(flow));
    }
    return chain;
}

std::pair<Circuit, Circuit> build_distributed_qpe(const QpeConfig& cfg, const std::string& control_id,
                                                  const std::string& target_id,
                                                  const EngineConfig& engine) {
    check_config(cfg);
    const std::size_t n = cfg.n_ancilla;
    check_width(n + cfg.target_qubits + 2, engine, "distributed QPE");
    Circuit control(n, n, control_id);
    Circuit target(cfg.target_qubits, 0, target_id);
    if (cfg.eigenstate) target.x(0);
    for (std::size_t t = 0; t < n; ++t) control.h(t);
    for (std::size_t t = 0; t < n; ++t) {
        control.expose(t, {remote_gate("crz", {0}, {Param(power_angle(cfg.theta, t))})}, target_id);
    }
    append_inverse_qft(control, 0, n);
    for (std::size_t t = 0; t < n; ++t) control.measure(t, t);
    return {std::move(control), std::move(target)};
}

PhaseEstimate extract_phase(const Counts& counts, std::size_t n) {
    if (n < 1 || n > 62) throw Error(ErrorCode::InvalidArgument, "n must be in [1, 62]");
    std::map<std::uint64_t, std::uint64_t> marginal;
    for (const auto& [key, hits] : counts) {
        if (key.size() < n) {
            throw Error(ErrorCode::LengthMismatch,
                        "key '" + key + "' shorter than " + std::to_string(n) + " bits");
        }
        std::uint64_t xi = 0;
        for (std::size_t b = 0; b < n; ++b) {
            if (key[key.size() - 1 - b] == '1') xi |= std::uint64_t{1} << b;
        }
        marginal[xi] += hits;
    }
    std::uint64_t best = 0, best_hits = 0;
    bool any = false;
    for (const auto& [xi, hits] : marginal) {
        if (hits > best_hits) {
            best = xi;
            best_hits = hits;
            any = true;
        }
    }
    if (!any) throw Error(ErrorCode::EmptyCounts, "no shots to estimate a phase from");
    const double scale = std::ldexp(1.0, static_cast<int>(n));
    return {best, n, static_cast<double>(best) / scale, 1.0 / scale};
}

PhaseEstimate ipea_bits_to_phase(const std::vector<int>& bits, std::size_t n) {
    if (bits.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(n) + " bits, got " +
                                                   std::to_string(bits.size()));
    }
    if (n < 1 || n > 62) throw Error(ErrorCode::InvalidArgument, "n must be in [1, 62]");
    std::uint64_t xi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (bits[i] != 0 && bits[i] != 1) throw Error(ErrorCode::InvalidArgument, "bits must be 0 or 1");
        if (bits[i] == 1) xi |= std::uint64_t{1} << i;
    }
    const double scale = std::ldexp(1.0, static_cast<int>(n));
    return {xi, n, static_cast<double>(xi) / scale, 1.0 / scale};
}

int most_frequent_bit(const Counts& counts, std::size_t clbit) {
    std::uint64_t ones = 0, zeros = 0;
    for (const auto& [key, hits] : counts) {
        if (clbit >= key.size()) throw Error(ErrorCode::LengthMismatch, "key '" + key + "' too short");
        (key[key.size() - 1 - clbit] == '1' ? ones : zeros) += hits;
    }
    if (ones + zeros == 0) throw Error(ErrorCode::EmptyCounts, "no shots");
    return ones > zeros ? 1 : 0;
}

}  // namespace vqpu
