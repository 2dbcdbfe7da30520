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

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "vqpu/circuit/circuit.hpp"

// Reference implementations written independently of the engine: dense
// 2^n x 2^n matrices built from textbook gate definitions.
namespace oracle {

using cd = std::complex<double>;
using Mat = std::vector<std::vector<cd>>;
using Vec = std::vector<cd>;

inline Mat identity(std::size_t d) {
    Mat m(d, std::vector<cd>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
    return m;
}

inline Mat matmul(const Mat& a, const Mat& b) {
    const std::size_t d = a.size();
    Mat out(d, std::vector<cd>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t j = 0; j < d; ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

inline Vec apply(const Mat& m, const Vec& v) {
    Vec out(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

// 2x2 single-qubit matrix as {{a, b}, {c, d}}.
inline std::vector<std::vector<cd>> one_qubit(const std::string& name,
                                              const std::vector<double>& p) {
    const cd i(0, 1);
    const double r = 1 / std::sqrt(2.0);
    if (name == "id") return {{1, 0}, {0, 1}};
    if (name == "x") return {{0, 1}, {1, 0}};
    if (name == "y") return {{0, -i}, {i, 0}};
    if (name == "z") return {{1, 0}, {0, -1}};
    if (name == "h") return {{r, r}, {r, -r}};
    if (name == "s") return {{1, 0}, {0, i}};
    if (name == "sdg") return {{1, 0}, {0, -i}};
    if (name == "t") return {{1, 0}, {0, std::exp(i * (std::numbers::pi / 4))}};
    if (name == "tdg") return {{1, 0}, {0, std::exp(-i * (std::numbers::pi / 4))}};
    if (name == "rx") {
        const double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
        return {{c, -i * s}, {-i * s, c}};
    }
    if (name == "ry") {
        const double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
        return {{c, -s}, {s, c}};
    }
    if (name == "rz") return {{std::exp(-i * (p[0] / 2)), 0}, {0, std::exp(i * (p[0] / 2))}};
    if (name == "p") return {{1, 0}, {0, std::exp(i * p[0])}};
    if (name == "u") {
        const double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
        return {{c, -std::exp(i * p[2]) * s},
                {std::exp(i * p[1]) * s, std::exp(i * (p[1] + p[2])) * c}};
    }
    return {};
}

// Full-register matrix of a gate; qubit k is bit k of the basis index.
inline Mat full_matrix(std::size_t n, const std::string& name, const std::vector<std::size_t>& q,
                       const std::vector<double>& p) {
    const std::size_t d = std::size_t{1} << n;
    Mat m(d, std::vector<cd>(d, 0.0));
    auto bit = [](std::size_t x, std::size_t k) { return (x >> k) & 1U; };
    if (name == "swap") {
        for (std::size_t col = 0; col < d; ++col) {
            std::size_t row = col & ~((std::size_t{1} << q[0]) | (std::size_t{1} << q[1]));
            row |= bit(col, q[0]) << q[1];
            row |= bit(col, q[1]) << q[0];
            m[row][col] = 1.0;
        }
        return m;
    }
    const bool controlled = name.size() > 1 && name[0] == 'c';
    const std::string base = controlled ? (name == "cp" ? "p" : name.substr(1)) : name;
    const auto g = one_qubit(base, p);
    const std::size_t t = controlled ? q[1] : q[0];
    for (std::size_t col = 0; col < d; ++col) {
        if (controlled && bit(col, q[0]) == 0) {
            m[col][col] = 1.0;
            continue;
        }
        const std::size_t tb = bit(col, t);
        for (std::size_t out = 0; out < 2; ++out) {
            const std::size_t row = (col & ~(std::size_t{1} << t)) | (out << t);
            m[row][col] += g[out][tb];
        }
    }
    return m;
}

// Final state of a unitary-only circuit by explicit matrix products.
inline Vec circuit_state(const vqpu::Circuit& c) {
    const std::size_t d = std::size_t{1} << c.num_qubits();
    Mat u = identity(d);
    for (const auto& inst : c.instructions()) {
        std::vector<double> p;
        for (const auto& x : inst.params) p.push_back(x.value);
        u = matmul(full_matrix(c.num_qubits(), inst.name, inst.qubits, p), u);
    }
    Vec v(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) v[i] = u[i][0];
    return v;
}

inline Vec kron(const Vec& hi, const Vec& lo) {
    Vec out(hi.size() * lo.size());
    for (std::size_t a = 0; a < hi.size(); ++a)
        for (std::size_t b = 0; b < lo.size(); ++b) out[a * lo.size() + b] = hi[a] * lo[b];
    return out;
}

// rho = |v><v|.
inline Mat density(const Vec& v) {
    Mat rho(v.size(), std::vector<cd>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) rho[i][j] = v[i] * std::conj(v[j]);
    return rho;
}

// Post-measurement state of `qubit` with outcome `bit` via projector algebra.
inline Mat project_density(const Mat& rho, std::size_t qubit, int bit) {
    const std::size_t d = rho.size();
    Mat out(d, std::vector<cd>(d, 0.0));
    double tr = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (static_cast<int>((i >> qubit) & 1U) == bit && static_cast<int>((j >> qubit) & 1U) == bit)
                out[i][j] = rho[i][j];
    for (std::size_t i = 0; i < d; ++i) tr += out[i][i].real();
    for (auto& row : out)
        for (auto& x : row) x /= tr;
    return out;
}

// Two-sample chi-square homogeneity test; returns the p-value.
inline double chi_square_homogeneity(const std::map<std::string, std::uint64_t>& a,
                                     const std::map<std::string, std::uint64_t>& b) {
    std::map<std::string, std::pair<double, double>> cells;
    double na = 0, nb = 0;
    for (const auto& [k, v] : a) {
        cells[k].first = static_cast<double>(v);
        na += static_cast<double>(v);
    }
    for (const auto& [k, v] : b) {
        cells[k].second = static_cast<double>(v);
        nb += static_cast<double>(v);
    }
    double stat = 0;
    for (const auto& [k, ab] : cells) {
        const double tot = ab.first + ab.second;
        const double ea = tot * na / (na + nb), eb = tot * nb / (na + nb);
        stat += (ab.first - ea) * (ab.first - ea) / ea + (ab.second - eb) * (ab.second - eb) / eb;
    }
    if (cells.size() < 2) return 1.0;
    boost::math::chi_squared dist(static_cast<double>(cells.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

// Goodness of fit of observed counts against exact probabilities.
inline double chi_square_fit(const std::map<std::string, std::uint64_t>& observed,
                             const std::map<std::string, double>& expected_prob) {
    double n = 0;
    for (const auto& [k, v] : observed) n += static_cast<double>(v);
    double stat = 0;
    std::size_t cells = 0;
    for (const auto& [k, p] : expected_prob) {
        if (p <= 0) continue;
        ++cells;
        const auto it = observed.find(k);
        const double o = it == observed.end() ? 0.0 : static_cast<double>(it->second);
        stat += (o - n * p) * (o - n * p) / (n * p);
    }
    for (const auto& [k, v] : observed) {
        auto it = expected_prob.find(k);
        if (it == expected_prob.end() || it->second <= 0) return 0.0;
    }
    if (cells < 2) return 1.0;
    boost::math::chi_squared dist(static_cast<double>(cells - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

inline const std::vector<std::string>& random_gate_pool() {
    static const std::vector<std::string> pool{"id", "x",  "y",  "z",  "h",  "s",  "sdg",
                                               "t",  "tdg", "rx", "ry", "rz", "u", "cx",
                                               "cy", "cz", "crz", "cp", "swap"};
    return pool;
}

inline std::size_t pool_params(const std::string& g) {
    if (g == "u") return 3;
    if (g == "rx" || g == "ry" || g == "rz" || g == "crz" || g == "cp") return 1;
    return 0;
}

inline bool pool_two_qubit(const std::string& g) {
    return g == "cx" || g == "cy" || g == "cz" || g == "crz" || g == "cp" || g == "swap";
}

// Random unitary circuit over the engine gate set.
inline vqpu::Circuit random_unitary_circuit(std::mt19937_64& rng, std::size_t n, std::size_t gates) {
    vqpu::Circuit c(n, n);
    const auto& pool = random_gate_pool();
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<std::size_t> qpick(0, n - 1);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    for (std::size_t g = 0; g < gates; ++g) {
        std::string name = pool[pick(rng)];
        if (n < 2 && pool_two_qubit(name)) name = "h";
        std::vector<std::size_t> qs{qpick(rng)};
        if (pool_two_qubit(name)) {
            std::size_t b = qpick(rng);
            while (b == qs[0]) b = qpick(rng);
            qs.push_back(b);
        }
        std::vector<vqpu::Param> ps;
        for (std::size_t k = 0; k < pool_params(name); ++k) ps.emplace_back(angle(rng));
        c.gate(name, qs, ps);
    }
    return c;
}

}  // namespace oracle
