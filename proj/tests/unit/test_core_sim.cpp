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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vqpu/error.hpp"
#include "vqpu/sim/engine.hpp"
#include "vqpu/sim/state_vector.hpp"

using namespace vqpu;

namespace {

constexpr double kPi = std::numbers::pi;

GateOp make_op(std::string name, std::vector<std::size_t> qubits, std::vector<double> params = {}) {
    GateOp op;
    op.name = std::move(name);
    op.qubits = std::move(qubits);
    op.params = std::move(params);
    return op;
}

void expect_state_near(const StateVector& s, const oracle::Vec& v, double tol) {
    ASSERT_EQ(s.dimension(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        EXPECT_NEAR(s[i].real(), v[i].real(), tol) << "index " << i;
        EXPECT_NEAR(s[i].imag(), v[i].imag(), tol) << "index " << i;
    }
}

Circuit qpe3_quarter() {
    // 3 counting qubits, target qubit 3, phase 0.25 from crz(2*theta*2^t), theta = pi/2.
    const double theta = kPi / 2;
    Circuit c(4, 3);
    c.x(3);
    for (std::size_t t = 0; t < 3; ++t) c.h(t);
    for (std::size_t t = 0; t < 3; ++t) c.crz(2 * theta * std::pow(2.0, t), t, 3);
    c.swap(0, 2);
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t k = 0; k < j; ++k) c.cp(-kPi / std::pow(2.0, j - k), k, j);
        c.h(j);
    }
    for (std::size_t t = 0; t < 3; ++t) c.measure(t, t);
    return c;
}

}  // namespace

TEST(ApplyGate, HadamardOnZero) {
    StateVector s(1);
    apply_gate(s, make_op("h", {0}));
    EXPECT_NEAR(s[0].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s[1].real(), 1 / std::sqrt(2.0), 1e-15);
}

TEST(ApplyGate, XIsLittleEndian) {
    for (std::size_t n = 1; n <= 10; ++n) {
        for (std::size_t k = 0; k < n; ++k) {
            StateVector s(n);
            apply_gate(s, make_op("x", {k}));
            EXPECT_DOUBLE_EQ(std::abs(s[std::size_t{1} << k]), 1.0) << n << " " << k;
        }
    }
}

TEST(ApplyGate, ControlledRzOnOneOne) {
    StateVector s(2);
    apply_gate(s, make_op("x", {0}));
    apply_gate(s, make_op("x", {1}));
    apply_gate(s, make_op("crz", {1, 0}, {4.0}));
    const auto expected = oracle::apply(oracle::full_matrix(2, "crz", {1, 0}, {4.0}),
                                        {0, 0, 0, 1});
    expect_state_near(s, expected, 1e-14);
    EXPECT_NEAR(std::arg(s[3]), 2.0, 1e-14);
}

TEST(ApplyGate, Errors) {
    StateVector s(2);
    try {
        apply_gate(s, make_op("foo", {0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownGate);
    }
    try {
        apply_gate(s, make_op("cx", {0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ArityMismatch);
    }
    try {
        apply_gate(s, make_op("rz", {0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ArityMismatch);
    }
    try {
        apply_gate(s, make_op("x", {2}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::QubitOutOfRange);
    }
}

TEST(ApplyGate, MatchesMatrixProductOracle) {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const std::size_t gates = 1 + (trial * 7) % 8;
        Circuit c = oracle::random_unitary_circuit(rng, n, gates);
        const StateVector s = simulate_statevector(c);
        expect_state_near(s, oracle::circuit_state(c), 1e-10);
    }
}

TEST(ApplyGate, NormPreserved) {
    std::mt19937_64 rng(99);
    StateVector s(6);
    Circuit c = oracle::random_unitary_circuit(rng, 6, 400);
    for (const auto& inst : c.instructions()) {
        std::vector<double> p;
        for (const auto& x : inst.params) p.push_back(x.value);
        apply_gate(s, make_op(inst.name, inst.qubits, p));
        ASSERT_NEAR(s.norm_squared(), 1.0, 1e-12);
    }
}

TEST(Measure, BasisStateIsDeterministic) {
    StateVector s(1);
    apply_gate(s, make_op("x", {0}));
    ShotRng rng(7);
    EXPECT_EQ(measure_qubit(s, 0, rng), 1);
    EXPECT_DOUBLE_EQ(std::abs(s[1]), 1.0);
}

TEST(Measure, BellCollapseMatchesDensityOracle) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        StateVector s(2);
        apply_gate(s, make_op("h", {0}));
        apply_gate(s, make_op("cx", {0, 1}));
        const oracle::Vec bell(s.amplitudes().begin(), s.amplitudes().end());
        ShotRng rng(seed);
        const int m = measure_qubit(s, 0, rng);
        const auto rho = oracle::project_density(oracle::density(bell), 0, m);
        const oracle::Vec post(s.amplitudes().begin(), s.amplitudes().end());
        const auto got = oracle::density(post);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(got[i][j] - rho[i][j]), 0, 1e-12);
        EXPECT_NEAR(std::norm(s[m == 0 ? 0 : 3]), 1.0, 1e-12);
    }
}

TEST(Measure, ReplayIsDeterministic) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        int first = -1;
        for (int replay = 0; replay < 3; ++replay) {
            StateVector s(1);
            apply_gate(s, make_op("h", {0}));
            ShotRng rng(seed);
            const int b = measure_qubit(s, 0, rng);
            if (first < 0) first = b;
            EXPECT_EQ(b, first);
        }
    }
}

TEST(Measure, OutOfRange) {
    StateVector s(1);
    ShotRng rng(0);
    try {
        measure_qubit(s, 3, rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::QubitOutOfRange);
    }
}

TEST(Reset, OneGoesToZero) {
    StateVector s(1);
    apply_gate(s, make_op("x", {0}));
    ShotRng rng(3);
    reset_qubit(s, 0, rng);
    EXPECT_NEAR(std::norm(s[0]), 1.0, 1e-15);
}

TEST(Reset, SuperpositionAnySeed) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        StateVector s(1);
        apply_gate(s, make_op("h", {0}));
        ShotRng rng(seed);
        reset_qubit(s, 0, rng);
        EXPECT_NEAR(std::norm(s[0]), 1.0, 1e-12);
    }
}

TEST(Reset, BellPartnerKeepsOutcome) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        StateVector s(2);
        apply_gate(s, make_op("h", {0}));
        apply_gate(s, make_op("cx", {0, 1}));
        const oracle::Vec bell(s.amplitudes().begin(), s.amplitudes().end());
        ShotRng probe(seed);
        ShotRng rng(seed);
        reset_qubit(s, 1, rng);
        // Oracle: project qubit 1 on the outcome, then flip it back to 0.
        StateVector ref(2);
        apply_gate(ref, make_op("h", {0}));
        apply_gate(ref, make_op("cx", {0, 1}));
        const int m = measure_qubit(ref, 1, probe);
        auto rho = oracle::project_density(oracle::density(bell), 1, m);
        if (m == 1) {
            const auto x1 = oracle::full_matrix(2, "x", {1}, {});
            rho = oracle::matmul(oracle::matmul(x1, rho), x1);
        }
        const oracle::Vec post(s.amplitudes().begin(), s.amplitudes().end());
        const auto got = oracle::density(post);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(got[i][j] - rho[i][j]), 0, 1e-12);
        EXPECT_NEAR(std::norm(s[static_cast<std::size_t>(m)]), 1.0, 1e-12);
    }
}

TEST(RunSampled, Completeness) {
    Circuit c(1, 1);
    c.h(0).measure(0, 0);
    const Counts counts = run_sampled(c, 100, 5);
    EXPECT_EQ(total_shots(counts), 100u);
    for (const auto& [k, v] : counts) EXPECT_TRUE(k == "0" || k == "1");
}

TEST(RunSampled, QpeQuarterIsDeterministic) {
    const Circuit c = qpe3_quarter();
    const Counts counts = run_sampled(c, 100, 11);
    EXPECT_EQ(counts, (Counts{{"010", 100}}));
    // Full statevector oracle: all weight on counting register value 2.
    Circuit unitary(4);
    for (const auto& inst : c.instructions())
        if (inst.name != "measure") unitary.append(inst);
    const auto v = oracle::circuit_state(unitary);
    double p = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if ((i & 7U) == 2U) p += std::norm(v[i]);
    EXPECT_NEAR(p, 1.0, 1e-12);
}

TEST(RunSampled, EmptyCircuit) {
    Circuit c(1, 1);
    c.measure(0, 0);
    EXPECT_EQ(run_sampled(c, 7, 0), (Counts{{"0", 7}}));
}

TEST(RunSampled, RejectsNonAdmissible) {
    Circuit c(2, 1);
    c.h(0).measure(0, 0).c_if("x", {1}, 0);
    EXPECT_FALSE(is_sampling_admissible(c));
    try {
        run_sampled(c, 10, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsupportedInstruction);
    }
    Circuit d(2, 1, "a");
    d.measure_and_send(0, "b");
    try {
        run_sampled(d, 10, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsupportedInstruction);
    }
}

TEST(RunSampled, WidthCap) {
    Circuit c(27, 1);
    c.measure(0, 0);
    try {
        run_sampled(c, 1, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::WidthExceeded);
    }
    Circuit small(3, 1);
    small.measure(0, 0);
    EngineConfig cfg;
    cfg.max_qubits = 2;
    EXPECT_THROW(run_shot_loop(small, 1, 0, {}, cfg), Error);
}

TEST(RunSampled, ZeroShots) {
    Circuit c(1, 1);
    c.measure(0, 0);
    try {
        run_sampled(c, 0, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidShots);
    }
}

TEST(RunShotLoop, BasisFlip) {
    Circuit c(1, 1);
    c.x(0).measure(0, 0);
    EXPECT_EQ(run_shot_loop(c, 5, 0), (Counts{{"1", 5}}));
}

TEST(RunShotLoop, FeedForwardCorrelates) {
    Circuit c(2, 2);
    c.h(0).measure(0, 0).c_if("x", {1}, 0).measure(1, 1);
    const Counts counts = run_shot_loop(c, 1000, 21);
    EXPECT_EQ(counts.size(), 2u);
    EXPECT_TRUE(counts.count("00"));
    EXPECT_TRUE(counts.count("11"));
}

TEST(RunShotLoop, RemoteConditionWithForcedBit) {
    Circuit c(2, 2, "me");
    c.remote_c_if("x", {1}, "peer").measure(0, 0).measure(1, 1);
    ChannelHooks hooks;
    hooks.send = [](const std::string&, std::uint64_t, std::uint64_t, int) {};
    hooks.recv = [](const std::string&, std::uint64_t, std::uint64_t) { return 1; };
    EXPECT_EQ(run_shot_loop(c, 10, 0, hooks), (Counts{{"10", 10}}));
}

TEST(RunShotLoop, MeasureAndSendPassesBitsAndTags) {
    Circuit c(1, 0, "me");
    c.x(0).measure_and_send(0, "peer").measure_and_send(0, "peer");
    std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t, int>> sent;
    ChannelHooks hooks;
    hooks.send = [&](const std::string& p, std::uint64_t shot, std::uint64_t seq, int bit) {
        sent.emplace_back(p, shot, seq, bit);
    };
    hooks.recv = [](const std::string&, std::uint64_t, std::uint64_t) { return 0; };
    run_shot_loop(c, 2, 0, hooks);
    ASSERT_EQ(sent.size(), 4u);
    EXPECT_EQ(sent[0], std::make_tuple(std::string("peer"), 0ull, 0ull, 1));
    EXPECT_EQ(sent[1], std::make_tuple(std::string("peer"), 0ull, 1ull, 1));
    EXPECT_EQ(sent[3], std::make_tuple(std::string("peer"), 1ull, 1ull, 1));
}

TEST(RunShotLoop, HookErrorNamesShot) {
    Circuit c(1, 1, "me");
    c.remote_c_if("x", {0}, "peer").measure(0, 0);
    ChannelHooks hooks;
    hooks.send = [](const std::string&, std::uint64_t, std::uint64_t, int) {};
    hooks.recv = [](const std::string&, std::uint64_t shot, std::uint64_t) -> int {
        if (shot == 3) throw Error(ErrorCode::ChannelTimeout, "no bit");
        return 0;
    };
    try {
        run_shot_loop(c, 5, 0, hooks);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ChannelTimeout);
        EXPECT_NE(e.detail().find("shot 3"), std::string::npos);
    }
}

TEST(RunShotLoop, RejectsQuantumComm) {
    Circuit c(1, 0, "me");
    c.qsend(0, "peer");
    try {
        run_shot_loop(c, 1, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsupportedInstruction);
    }
}

TEST(RunShotLoop, UnboundParameter) {
    Circuit c(1, 1);
    c.rz(Param::named("theta"), 0).measure(0, 0);
    try {
        run_shot_loop(c, 1, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnboundParameter);
    }
}

TEST(RunShotLoop, SingleShotMatchesLoop) {
    Circuit c(3, 3);
    c.h(0).h(1).cx(1, 2).measure(0, 0).h(0).measure(0, 1).measure(2, 2);
    Counts rebuilt;
    for (std::uint64_t s = 0; s < 64; ++s) {
        const ShotRecord r = run_single_shot(c, 77, s);
        EXPECT_EQ(r.shot_index, s);
        EXPECT_EQ(r.classical_bits.size(), 3u);
        ++rebuilt[bits_to_key(r.classical_bits)];
    }
    EXPECT_EQ(rebuilt, run_shot_loop(c, 64, 77));
}

TEST(Engine, SeedDeterminism) {
    std::mt19937_64 rng(5);
    Circuit c = oracle::random_unitary_circuit(rng, 4, 20);
    c.measure_all();
    EXPECT_EQ(run_sampled(c, 2000, 42), run_sampled(c, 2000, 42));
    EXPECT_EQ(run_shot_loop(c, 500, 42), run_shot_loop(c, 500, 42));
    EXPECT_NE(run_shot_loop(c, 500, 42), run_shot_loop(c, 500, 43));
}

TEST(Engine, SampledAgreesWithShotLoop) {
    std::mt19937_64 rng(2024);
    int rejections = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Circuit c = oracle::random_unitary_circuit(rng, 4, 12);
        c.measure_all();
        const Counts a = run_sampled(c, 10000, 1000 + trial);
        const Counts b = run_shot_loop(c, 10000, 5000 + trial);
        if (oracle::chi_square_homogeneity(a, b) < 0.001) ++rejections;
    }
    EXPECT_EQ(rejections, 0);
}

TEST(Engine, SampledMatchesExactProbabilities) {
    std::mt19937_64 rng(8);
    Circuit c = oracle::random_unitary_circuit(rng, 3, 10);
    const auto v = oracle::circuit_state(c);
    c.measure_all();
    std::map<std::string, double> probs;
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::string key;
        for (int b = 2; b >= 0; --b) key += ((i >> b) & 1U) ? '1' : '0';
        probs[key] = std::norm(v[i]);
    }
    EXPECT_GT(oracle::chi_square_fit(run_sampled(c, 20000, 3), probs), 0.001);
}

TEST(Engine, KeysHaveClbitWidth) {
    Circuit c(2, 4);
    c.x(1).measure(1, 3);
    EXPECT_EQ(run_shot_loop(c, 3, 0), (Counts{{"1000", 3}}));
    EXPECT_EQ(run_sampled(c, 3, 0), (Counts{{"1000", 3}}));
}
