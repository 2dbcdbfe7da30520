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

#include <fstream>
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <json.hpp>

#include "oracles.hpp"
#include "vqpu/circuit/backend.hpp"
#include "vqpu/circuit/circuit.hpp"
#include "vqpu/circuit/ops.hpp"
#include "vqpu/circuit/wire.hpp"
#include "vqpu/error.hpp"
#include "vqpu/sim/engine.hpp"

using namespace vqpu;
using nlohmann::json;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

bool has_code(const std::vector<Violation>& v, ErrorCode code) {
    for (const auto& x : v)
        if (x.code == code) return true;
    return false;
}

Circuit bell() {
    Circuit c(2, 2, "bell");
    c.h(0).cx(0, 1).measure(0, 0).measure(1, 1);
    return c;
}

std::vector<std::string> names(const Circuit& c) {
    std::vector<std::string> out;
    for (const auto& i : c.instructions()) out.push_back(i.name);
    return out;
}

// Random valid circuit with local, conditioned, symbolic and distributed
// instructions.
Circuit random_circuit(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> nq(1, 5);
    const std::size_t n = nq(rng);
    Circuit c = oracle::random_unitary_circuit(rng, n, rng() % 10);
    c.set_id("c" + std::to_string(rng() % 100000));
    c.set_num_clbits(n);
    std::uniform_int_distribution<std::size_t> q(0, n - 1);
    const int extras = static_cast<int>(rng() % 8);
    for (int e = 0; e < extras; ++e) {
        switch (rng() % 8) {
            case 0: c.measure(q(rng), q(rng)); break;
            case 1: c.reset(q(rng)); break;
            case 2: c.c_if("x", {q(rng)}, q(rng), static_cast<int>(rng() % 2)); break;
            case 3: c.measure_and_send(q(rng), "peer" + std::to_string(rng() % 3)); break;
            case 4: c.remote_c_if("rz", {q(rng)}, "peer1", {Param(-0.75)}); break;
            case 5: c.qsend(q(rng), "peer2"); break;
            case 6: c.rz(Param::named("theta" + std::to_string(rng() % 2)), q(rng)); break;
            case 7:
                c.expose(q(rng), {remote_gate("cx", {rng() % 4}), remote_gate("crz", {1}, {0.5})},
                         "peer0");
                break;
        }
    }
    return c;
}

}  // namespace

TEST(Builder, AutoIdAndZeroQubits) {
    Circuit a(1), b(1);
    EXPECT_FALSE(a.id().empty());
    EXPECT_NE(a.id(), b.id());
    EXPECT_EQ(a.id().size(), 36u);
    EXPECT_EQ(code_of([] { Circuit c(0); }), ErrorCode::InvalidArgument);
}

TEST(Builder, GateChecks) {
    Circuit c(2);
    EXPECT_EQ(code_of([&] { c.gate("foo", {0}); }), ErrorCode::UnknownGate);
    EXPECT_EQ(code_of([&] { c.gate("cx", {0}); }), ErrorCode::ArityMismatch);
    EXPECT_EQ(code_of([&] { c.gate("x", {2}); }), ErrorCode::QubitOutOfRange);
    EXPECT_EQ(code_of([&] { c.measure(0, 0); }), ErrorCode::DanglingClbit);
}

TEST(Builder, MeasureAndSend) {
    Circuit c(1, 0, "send_circuit");
    c.measure_and_send(0, "recv_circuit");
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.instructions()[0].name, "measure_and_send");
    EXPECT_EQ(c.instructions()[0].remote->peer, "recv_circuit");
    EXPECT_EQ(c.instructions()[0].remote->role, LinkRole::Sender);
    c.measure_and_send(0, "recv_circuit");
    EXPECT_EQ(c.instructions()[0].remote->seq, 0u);
    EXPECT_EQ(c.instructions()[1].remote->seq, 1u);
    EXPECT_EQ(code_of([&] { c.measure_and_send(0, "send_circuit"); }), ErrorCode::SelfLink);
    EXPECT_EQ(code_of([&] { c.measure_and_send(1, "recv_circuit"); }),
              ErrorCode::QubitOutOfRange);
}

TEST(Builder, RemoteCIf) {
    Circuit c(1, 0, "recv_circuit");
    c.remote_c_if("x", {0}, "send_circuit");
    EXPECT_EQ(c.instructions()[0].remote->gate, std::optional<std::string>("x"));
    EXPECT_EQ(c.instructions()[0].remote->role, LinkRole::Receiver);
    c.remote_c_if("rz", {0}, "send_circuit", {-std::numbers::pi / 2});
    EXPECT_DOUBLE_EQ(c.instructions()[1].params[0].value, -std::numbers::pi / 2);
    EXPECT_EQ(c.instructions()[1].remote->seq, 1u);
    EXPECT_EQ(code_of([&] { c.remote_c_if("cx", {0}, "send_circuit"); }),
              ErrorCode::ArityMismatch);
    EXPECT_EQ(code_of([&] { c.remote_c_if("nope", {0}, "send_circuit"); }),
              ErrorCode::UnknownGate);
}

TEST(Builder, QsendQrecvTagsMatch) {
    Circuit s(1, 0, "send_circuit"), r(1, 0, "recv_circuit");
    s.qsend(0, "recv_circuit");
    r.qrecv(0, "send_circuit");
    EXPECT_EQ(s.instructions()[0].remote->seq, 0u);
    EXPECT_EQ(r.instructions()[0].remote->seq, 0u);
    EXPECT_EQ(code_of([&] { s.qsend(0, "send_circuit"); }), ErrorCode::SelfLink);
    EXPECT_EQ(code_of([&] { r.qrecv(3, "send_circuit"); }), ErrorCode::QubitOutOfRange);
}

TEST(Builder, Expose) {
    Circuit c(1, 0, "qpe_control");
    c.expose(0, {remote_gate("crz", {0}, {4.0})}, "qpe_target");
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(names(c), (std::vector<std::string>{"expose_begin", "crz", "expose_end"}));
    EXPECT_EQ(c.instructions()[0].remote->seq, c.instructions()[2].remote->seq);
    EXPECT_FALSE(c.instructions()[1].remote.has_value());
    EXPECT_EQ(code_of([&] { c.expose(0, {}, "qpe_target"); }), ErrorCode::EmptyBody);
    EXPECT_EQ(code_of([&] { c.expose(1, {remote_gate("cx", {0})}, "qpe_target"); }),
              ErrorCode::QubitOutOfRange);
    Instruction nested;
    nested.name = "expose_begin";
    nested.qubits = {0};
    EXPECT_EQ(code_of([&] { c.expose(0, {nested}, "qpe_target"); }), ErrorCode::NotSupported);
    EXPECT_EQ(code_of([&] { c.expose(0, {remote_gate("h", {0})}, "qpe_target"); }),
              ErrorCode::NotSupported);
    EXPECT_EQ(code_of([&] { c.expose(0, {remote_gate("cx", {0, 1})}, "qpe_target"); }),
              ErrorCode::ArityMismatch);
}

TEST(Builder, SequenceTagsConsecutive) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        Circuit c = random_circuit(rng);
        std::map<std::pair<std::string, std::string>, std::uint64_t> next;
        for (const auto& inst : c.instructions()) {
            if (!inst.remote || inst.name == "expose_end") continue;
            auto& n = next[{inst.name, inst.remote->peer}];
            EXPECT_EQ(inst.remote->seq, n);
            ++n;
        }
        EXPECT_TRUE(validate(c, default_backend()).empty()) << describe(validate(c, default_backend()));
    }
}

TEST(Builder, ParamSlotsAndBinding) {
    Circuit c(1, 1);
    c.rz(Param::named("a"), 0).rx(Param::named("b"), 0).ry(Param::named("a"), 0);
    EXPECT_EQ(c.param_slots(), (std::vector<std::string>{"a", "b"}));
    const Circuit bound = bind_parameters(c, {0.5, 1.5});
    EXPECT_DOUBLE_EQ(bound.instructions()[0].params[0].value, 0.5);
    EXPECT_DOUBLE_EQ(bound.instructions()[1].params[0].value, 1.5);
    EXPECT_DOUBLE_EQ(bound.instructions()[2].params[0].value, 0.5);
    EXPECT_FALSE(bound.instructions()[2].params[0].is_symbolic());
    EXPECT_EQ(code_of([&] { bind_parameters(c, {1.0}); }), ErrorCode::ArityMismatch);
}

TEST(Validate, BellOnDefault) { EXPECT_TRUE(validate(bell(), default_backend()).empty()); }

TEST(Validate, DefaultBackendShape) {
    const BackendSpec b = default_backend();
    EXPECT_EQ(b.n_qubits, 32u);
    EXPECT_EQ(b.basis_gates.size(), 19u);
}

TEST(Validate, WidthExceeded) {
    Circuit c(33);
    const auto v = validate(c, default_backend());
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].code, ErrorCode::WidthExceeded);
}

TEST(Validate, MissingGateName) {
    Circuit c(1, 0, "me");
    c.remote_c_if("x", {0}, "peer");
    c.mutable_instructions()[0].remote->gate.reset();
    EXPECT_TRUE(has_code(validate(c, default_backend()), ErrorCode::MalformedRemote));
}

TEST(Validate, CollectsEveryViolation) {
    Circuit c(40, 1, "me");
    c.append({"h", {50}, {}, {}, {}, {}});
    c.append({"measure", {0}, {5}, {}, {}, {}});
    c.append({"foo", {0}, {}, {}, {}, {}});
    c.append({"x", {0}, {}, {}, RemoteLink{"p", LinkRole::Sender, {}, 0}, {}});
    c.append({"measure_and_send", {0}, {}, {}, RemoteLink{"p", LinkRole::Sender, {}, 3}, {}});
    BackendSpec b = default_backend();
    b.basis_gates = {"x"};
    const auto v = validate(c, b);
    EXPECT_TRUE(has_code(v, ErrorCode::WidthExceeded));
    EXPECT_TRUE(has_code(v, ErrorCode::QubitOutOfRange));
    EXPECT_TRUE(has_code(v, ErrorCode::DanglingClbit));
    EXPECT_TRUE(has_code(v, ErrorCode::UnknownGate));
    EXPECT_TRUE(has_code(v, ErrorCode::UnsupportedGate));
    EXPECT_TRUE(has_code(v, ErrorCode::MalformedRemote));
}

TEST(Validate, NeverThrowsOnGarbage) {
    std::mt19937_64 rng(17);
    const std::vector<std::string> names{"h", "cx", "measure", "remote_c_if", "expose_begin",
                                         "expose_end", "qsend", "??", "reset", "crz"};
    for (int t = 0; t < 500; ++t) {
        Circuit c(1 + rng() % 4, rng() % 3, "me");
        for (int i = 0; i < 6; ++i) {
            Instruction inst;
            inst.name = names[rng() % names.size()];
            for (std::size_t k = 0; k < rng() % 3; ++k) inst.qubits.push_back(rng() % 6);
            for (std::size_t k = 0; k < rng() % 2; ++k) inst.clbits.push_back(rng() % 4);
            if (rng() % 2) inst.remote = RemoteLink{rng() % 2 ? "me" : "p", LinkRole::Receiver, {}, rng() % 3};
            c.append(inst);
        }
        EXPECT_NO_THROW(validate(c, default_backend()));
    }
}

TEST(Validate, BasisRestriction) {
    BackendSpec b = default_backend();
    b.basis_gates = {"h", "cx"};
    EXPECT_TRUE(validate(bell(), b).empty());
    Circuit c(1);
    c.x(0);
    EXPECT_TRUE(has_code(validate(c, b), ErrorCode::UnsupportedGate));
}

TEST(Backend, JsonRoundTripAndStrictness) {
    BackendSpec b = default_backend();
    b.coupling_map = std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}};
    EXPECT_EQ(backend_from_json(backend_to_json(b)), b);
    json j = backend_to_json(b);
    j["noise"] = 1;
    EXPECT_EQ(code_of([&] { backend_from_json(j); }), ErrorCode::SchemaViolation);
    json k = backend_to_json(b);
    k["basis_gates"].push_back("toffoli");
    EXPECT_EQ(code_of([&] { backend_from_json(k); }), ErrorCode::SchemaViolation);
    json m = backend_to_json(b);
    m["coupling_map"] = json::array({json::array({0})});
    EXPECT_EQ(code_of([&] { backend_from_json(m); }), ErrorCode::SchemaViolation);
}

TEST(Backend, LoadFile) {
    const auto path = std::filesystem::temp_directory_path() / "vqpu_backend_test.json";
    {
        std::ofstream out(path);
        out << R"({"name":"small","n_qubits":4,"basis_gates":["h","cx"],"version":"0.1"})";
    }
    const BackendSpec b = load_backend_file(path);
    EXPECT_EQ(b.name, "small");
    EXPECT_EQ(b.n_qubits, 4u);
    {
        std::ofstream out(path);
        out << "{broken";
    }
    EXPECT_EQ(code_of([&] { load_backend_file(path); }), ErrorCode::BackendFileInvalid);
    std::filesystem::remove(path);
    EXPECT_EQ(code_of([&] { load_backend_file(path); }), ErrorCode::BackendFileInvalid);
}

TEST(Ops, Concat) {
    Circuit a(1), b(1);
    a.h(0);
    b.x(0);
    const Circuit c = a + b;
    EXPECT_EQ(names(c), (std::vector<std::string>{"h", "x"}));
    EXPECT_NE(c.id(), a.id());
    Circuit empty(1);
    EXPECT_EQ((a + empty).instructions(), a.instructions());
    EXPECT_EQ(code_of([&] { concat(a, Circuit(2)); }), ErrorCode::WidthMismatch);
    Circuit w(1, 3);
    EXPECT_EQ((a + w).num_clbits(), 3u);
}

TEST(Ops, ConcatDepthBound) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 200; ++t) {
        Circuit a = oracle::random_unitary_circuit(rng, 3, rng() % 8);
        Circuit b = oracle::random_unitary_circuit(rng, 3, rng() % 8);
        EXPECT_LE(depth(a + b), depth(a) + depth(b));
        EXPECT_GE(depth(a + b), std::max(depth(a), depth(b)));
    }
}

TEST(Ops, TensorUnion) {
    Circuit a(1), b(1);
    a.h(0);
    b.x(0);
    const Circuit c = a | b;
    EXPECT_EQ(c.num_qubits(), 2u);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.instructions()[1].qubits, (std::vector<std::size_t>{1}));
    const Circuit d = a | Circuit(1);
    EXPECT_EQ(d.num_qubits(), 2u);
    EXPECT_EQ(d.instructions(), a.instructions());
    Circuit m1(1, 1), m2(1, 1);
    m1.measure(0, 0);
    m2.measure(0, 0);
    const Circuit m = m1 | m2;
    EXPECT_EQ(m.instructions()[1].clbits, (std::vector<std::size_t>{1}));
}

TEST(Ops, TensorUnionIsKronecker) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 50; ++t) {
        Circuit a = oracle::random_unitary_circuit(rng, 2, 6);
        Circuit b = oracle::random_unitary_circuit(rng, 2, 6);
        const StateVector s = simulate_statevector(a | b);
        const auto expected = oracle::kron(oracle::circuit_state(b), oracle::circuit_state(a));
        for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(std::abs(s[i] - expected[i]), 0, 1e-10);
    }
}

TEST(Ops, SplitsInvertComposition) {
    std::mt19937_64 rng(51);
    for (int t = 0; t < 200; ++t) {
        Circuit a = oracle::random_unitary_circuit(rng, 1 + rng() % 3, rng() % 6);
        Circuit b = oracle::random_unitary_circuit(rng, 1 + rng() % 3, rng() % 6);
        auto [top, bottom] = hor_split(a | b, a.num_qubits() - 1, a.num_clbits() - 1);
        EXPECT_EQ(top.instructions(), a.instructions());
        EXPECT_EQ(bottom.instructions(), b.instructions());
        EXPECT_EQ(top.num_qubits(), a.num_qubits());
        EXPECT_EQ(bottom.num_qubits(), b.num_qubits());
        EXPECT_EQ(bottom.num_clbits(), b.num_clbits());

        Circuit c = oracle::random_unitary_circuit(rng, a.num_qubits(), rng() % 6);
        auto [first, second] = vert_split(a + c, a.size());
        EXPECT_EQ(first.instructions(), a.instructions());
        EXPECT_EQ(second.instructions(), c.instructions());
    }
}

TEST(Ops, SplitErrors) {
    Circuit c(2);
    c.cx(0, 1);
    EXPECT_EQ(code_of([&] { hor_split(c, 0); }), ErrorCode::StraddlingGate);
    EXPECT_EQ(code_of([&] { hor_split(c, 1); }), ErrorCode::IndexOutOfRange);
    EXPECT_EQ(code_of([&] { vert_split(c, 2); }), ErrorCode::IndexOutOfRange);
    auto [x, y] = vert_split(c, 0);
    EXPECT_EQ(x.size(), 0u);
    EXPECT_EQ(y.size(), 1u);
}

TEST(Ops, DepthAndContains) {
    Circuit a(2);
    a.h(0).h(1);
    EXPECT_EQ(depth(a), 1u);
    Circuit b(2);
    b.h(0).cx(0, 1).h(1);
    EXPECT_EQ(depth(b), 3u);
    EXPECT_TRUE(contains(bell(), "cx"));
    EXPECT_FALSE(contains(bell(), "swap"));
    EXPECT_EQ(depth(Circuit(3)), 0u);
}

TEST(Ops, DepthMatchesLayerOracle) {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 100; ++t) {
        Circuit c = oracle::random_unitary_circuit(rng, 3, rng() % 10);
        // Oracle: greedy ASAP layering on explicit layer occupancy sets.
        std::vector<std::vector<bool>> layers;
        std::vector<std::size_t> ready(3, 0);
        for (const auto& inst : c.instructions()) {
            std::size_t l = 0;
            for (auto q : inst.qubits) l = std::max(l, ready[q]);
            if (layers.size() <= l) layers.resize(l + 1, std::vector<bool>(3, false));
            for (auto q : inst.qubits) {
                EXPECT_FALSE(layers[l][q]);
                layers[l][q] = true;
                ready[q] = l + 1;
            }
        }
        EXPECT_EQ(depth(c), layers.size());
    }
}

TEST(Wire, RoundTripRandom) {
    std::mt19937_64 rng(71);
    for (int t = 0; t < 1500; ++t) {
        const Circuit c = random_circuit(rng);
        EXPECT_EQ(from_wire(to_wire(c)), c);
    }
}

TEST(Wire, MissingNumQubits) {
    json j = circuit_to_json(bell());
    j.erase("num_qubits");
    try {
        from_wire(j.dump());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
        EXPECT_EQ(e.detail().rfind("num_qubits", 0), 0u);
    }
}

TEST(Wire, FieldPaths) {
    auto path_of = [](const json& j) {
        try {
            circuit_from_json(j);
        } catch (const Error& e) {
            return e.detail().substr(0, e.detail().find(':'));
        }
        return std::string("<none>");
    };
    json j = circuit_to_json(bell());
    j["instructions"][1]["qubits"] = "0";
    EXPECT_EQ(path_of(j), "instructions[1].qubits");
    j = circuit_to_json(bell());
    j["instructions"][0]["extra"] = true;
    EXPECT_EQ(path_of(j), "instructions[0].extra");
    j = circuit_to_json(bell());
    j["color"] = "red";
    EXPECT_EQ(path_of(j), "color");
    j = circuit_to_json(bell());
    j["instructions"][2]["remote"] = {{"peer", "x"}, {"role", "boss"}, {"seq", 0}};
    EXPECT_EQ(path_of(j), "instructions[2].remote.role");
    j = circuit_to_json(bell());
    j["instructions"][0]["qubits"][0] = -1;
    EXPECT_EQ(path_of(j), "instructions[0].qubits[0]");
    EXPECT_EQ(code_of([] { from_wire("{"); }), ErrorCode::SchemaViolation);
}

TEST(Wire, BellGoldenFixture) {
    std::ifstream in(std::string(VQPU_FIXTURE_DIR) + "/bell.json");
    ASSERT_TRUE(in.good());
    const json golden = json::parse(in);
    EXPECT_EQ(circuit_to_json(bell()), golden);
    EXPECT_EQ(circuit_from_json(golden), bell());
}
