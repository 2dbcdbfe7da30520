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

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <thread>

#include <gtest/gtest.h>

#include "temp_home.hpp"
#include "vqpu/error.hpp"
#include "vqpu/net/socket.hpp"
#include "vqpu/orchestrator/lifecycle.hpp"
#include "vqpu/orchestrator/registry.hpp"

using namespace vqpu;
using namespace std::chrono_literals;

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

std::size_t alive_rows(const std::vector<QinfoRow>& rows) {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.alive;
    return n;
}

RegistryEntry fake_entry(const std::string& id) {
    RegistryEntry e;
    e.family = "fake";
    e.vqpu_id = id;
    e.port = 1;
    e.pid = 999999;
    return e;
}

}  // namespace

TEST(Registry, ParseTtl) {
    EXPECT_EQ(parse_ttl("00:10:00"), 600u);
    EXPECT_EQ(parse_ttl("01:00:02"), 3602u);
    EXPECT_EQ(parse_ttl("100:00:00"), 360000u);
    EXPECT_EQ(code_of([] { parse_ttl("10:00"); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { parse_ttl("00:61:00"); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { parse_ttl("aa:bb:cc"); }), ErrorCode::InvalidArgument);
}

TEST(Registry, EntryRoundTrip) {
    RegistryEntry e = fake_entry("x");
    e.pid = ::getpid();
    e.comm_mode = CommMode::Quantum;
    e.executor_endpoint = "127.0.0.1:9";
    e.cores = 4;
    e.mem_per_qpu = "2G";
    e.co_located = true;
    e.node = "node3";
    EXPECT_EQ(entry_from_json(entry_to_json(e)), e);
    auto j = entry_to_json(e);
    j.erase("pid");
    EXPECT_EQ(code_of([&] { entry_from_json(j); }), ErrorCode::SchemaViolation);
}

TEST(Registry, ConcurrentWritersNeverCorrupt) {
    TempHome home;
    Registry reg(home.path());
    std::vector<pid_t> children;
    for (int p = 0; p < 3; ++p) {
        const pid_t pid = ::fork();
        if (pid == 0) {
            for (int i = 0; i < 15; ++i) {
                reg.update([&](auto& all) { all.push_back(fake_entry("p" + std::to_string(p) + "_" + std::to_string(i))); });
            }
            ::_exit(0);
        }
        children.push_back(pid);
    }
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 15; ++i) {
                reg.update([&](auto& all) { all.push_back(fake_entry("t" + std::to_string(t) + "_" + std::to_string(i))); });
            }
        });
    }
    for (auto& t : threads) t.join();
    for (pid_t c : children) ::waitpid(c, nullptr, 0);
    EXPECT_EQ(reg.load().size(), 105u);
    EXPECT_EQ(reg.remove({"t0_0", "p2_14", "missing"}), 2u);
    EXPECT_EQ(reg.load().size(), 103u);
}

TEST(Registry, ProcessAlive) {
    EXPECT_TRUE(process_alive(::getpid()));
    const pid_t child = ::fork();
    if (child == 0) ::_exit(0);
    std::this_thread::sleep_for(50ms);
    EXPECT_FALSE(process_alive(child));  // zombie
    ::waitpid(child, nullptr, 0);
    EXPECT_FALSE(process_alive(child));
    EXPECT_FALSE(process_alive(0));
}

TEST(Lifecycle, RaiseInfoDrop) {
    TempHome home;
    const QraiseResult r = qraise(home.options(4));
    EXPECT_EQ(r.family, "family_1");
    ASSERT_EQ(r.entries.size(), 4u);
    for (const auto& e : r.entries) {
        EXPECT_EQ(e.comm_mode, CommMode::None);
        EXPECT_EQ(e.kind, "vqpu");
        EXPECT_EQ(e.ttl_s, 600u);
    }
    const auto rows = qinfo(std::nullopt, home.path());
    EXPECT_EQ(rows.size(), 4u);
    EXPECT_EQ(alive_rows(rows), 4u);
    EXPECT_EQ(qdrop(r.family, home.path()).terminated, 4u);
    EXPECT_TRUE(qinfo(std::nullopt, home.path()).empty());
    for (const auto& e : r.entries) EXPECT_FALSE(process_alive(e.pid));
    // Idempotent.
    const auto again = qdrop(r.family, home.path());
    EXPECT_EQ(again.terminated, 0u);
    EXPECT_EQ(again.warnings.size(), 1u);
}

TEST(Lifecycle, QuantumFamilyHasExecutor) {
    TempHome home;
    QraiseOptions o = home.options(2, "00:05:00");
    o.quantum_comm = true;
    const QraiseResult r = qraise(o);
    ASSERT_EQ(r.entries.size(), 3u);
    std::size_t executors = 0;
    std::string exec_addr;
    for (const auto& e : r.entries) {
        EXPECT_EQ(e.comm_mode, CommMode::Quantum);
        if (e.kind == "executor") {
            ++executors;
            exec_addr = e.address();
        }
    }
    EXPECT_EQ(executors, 1u);
    for (const auto& e : r.entries) {
        if (e.kind == "vqpu") EXPECT_EQ(e.executor_endpoint, exec_addr);
    }
    EXPECT_EQ(alive_rows(qinfo(std::nullopt, home.path())), 3u);
}

TEST(Lifecycle, FlagErrors) {
    TempHome home;
    QraiseOptions o = home.options(1);
    o.classical_comm = o.quantum_comm = true;
    EXPECT_EQ(code_of([&] { qraise(o); }), ErrorCode::ConflictingFlags);
    o = home.options(1);
    o.noise_prop = true;
    EXPECT_EQ(code_of([&] { qraise(o); }), ErrorCode::UnsupportedOption);
    o = home.options(1);
    o.sim = "density_matrix";
    EXPECT_EQ(code_of([&] { qraise(o); }), ErrorCode::UnsupportedOption);
    o = home.options(1, "ten minutes");
    EXPECT_EQ(code_of([&] { qraise(o); }), ErrorCode::InvalidArgument);
    o = home.options(1);
    const auto bad = home.path() / "bad_backend.json";
    std::ofstream(bad) << "{\"name\": 3}";
    o.backend = bad.string();
    EXPECT_EQ(code_of([&] { qraise(o); }), ErrorCode::BackendFileInvalid);
    o = home.options(1);
    o.name = "dup";
    qraise(o);
    EXPECT_EQ(code_of([&] { qraise(o); }), ErrorCode::DuplicateFamilyName);
    EXPECT_EQ(Registry(home.path()).load().size(), 1u);
}

TEST(Lifecycle, PortExhausted) {
    TempHome home;
    net::Listener hog = net::Listener::bind("127.0.0.1", 0);
    QraiseOptions o = home.options(1);
    o.ports = std::make_pair(hog.port(), hog.port());
    EXPECT_EQ(code_of([&] { qraise(o); }), ErrorCode::PortExhausted);
    EXPECT_TRUE(Registry(home.path()).load().empty());
}

TEST(Lifecycle, BackendFileRecorded) {
    TempHome home;
    const auto path = home.path() / "small.json";
    std::ofstream(path) << R"({"name":"small","n_qubits":4,"basis_gates":["h","cx"],"coupling_map":null,"version":"1.0.0"})";
    QraiseOptions o = home.options(1);
    o.backend = path.string();
    o.cores = 2;
    o.mem_per_qpu = "1G";
    const auto r = qraise(o);
    EXPECT_EQ(r.entries[0].backend_path, std::filesystem::absolute(path).string());
    EXPECT_EQ(r.entries[0].cores, 2u);
    const auto rows = qinfo(std::nullopt, home.path());
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(rows[0].alive);
}

TEST(Lifecycle, DropAllCountsEveryProcess) {
    TempHome home;
    QraiseOptions a = home.options(2);
    a.name = "two";
    QraiseOptions b = home.options(3);
    b.name = "three";
    qraise(a);
    qraise(b);
    QraiseOptions q = home.options(2);
    q.quantum_comm = true;
    q.name = "quantum";
    qraise(q);
    EXPECT_EQ(qinfo(std::string("three"), home.path()).size(), 3u);
    EXPECT_EQ(qdrop(std::nullopt, home.path()).terminated, 8u);
    EXPECT_TRUE(Registry(home.path()).load().empty());
}

TEST(Lifecycle, KilledProcessIsStaleThenPruned) {
    TempHome home;
    const auto r = qraise(home.options(4));
    ::kill(r.entries[1].pid, SIGKILL);
    ::waitpid(r.entries[1].pid, nullptr, 0);
    const auto rows = qinfo(std::nullopt, home.path());
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_FALSE(rows[1].alive);
    EXPECT_EQ(alive_rows(rows), 3u);
    const auto next = qinfo(std::nullopt, home.path());
    EXPECT_EQ(next.size(), 3u);
    EXPECT_EQ(alive_rows(next), 3u);
}

TEST(Lifecycle, TtlSelfExpiry) {
    TempHome home;
    const auto r = qraise(home.options(2, "00:00:02"));
    const auto t0 = std::chrono::steady_clock::now();
    while (!Registry(home.path()).load().empty() && std::chrono::steady_clock::now() - t0 < 6s) {
        std::this_thread::sleep_for(50ms);
    }
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    EXPECT_TRUE(Registry(home.path()).load().empty());
    EXPECT_LT(elapsed, 3s);
    for (const auto& e : r.entries) {
        ::waitpid(e.pid, nullptr, 0);
        EXPECT_FALSE(process_alive(e.pid));
    }
}

TEST(Lifecycle, NodeLabelsRoundRobin) {
    TempHome home;
    QraiseOptions o = home.options(4);
    o.n_nodes = 2;
    o.co_located = true;
    const auto r = qraise(o);
    EXPECT_EQ(r.entries[0].node, "node0");
    EXPECT_EQ(r.entries[1].node, "node1");
    EXPECT_EQ(r.entries[2].node, "node0");
    EXPECT_TRUE(r.entries[3].co_located);
}
