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

#include "vqpu/orchestrator/lifecycle.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "vqpu/circuit/backend.hpp"
#include "vqpu/error.hpp"
#include "vqpu/net/client.hpp"

namespace vqpu {

using nlohmann::json;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

struct Spawned {
    int pid = 0;
    std::uint16_t port = 0;
};

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    ::gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

fs::path resolve_server(const fs::path& configured) {
    if (!configured.empty()) return configured;
    std::error_code ec;
    const fs::path self = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) {
        const fs::path sibling = self.parent_path() / "vqpu-server";
        if (fs::exists(sibling)) return sibling;
    }
    if (const char* path = std::getenv("PATH")) {
        std::stringstream dirs(path);
        std::string dir;
        while (std::getline(dirs, dir, ':')) {
            const fs::path candidate = fs::path(dir) / "vqpu-server";
            if (!dir.empty() && fs::exists(candidate)) return candidate;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "vqpu-server executable not found");
}

void kill_and_reap(int pid) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, nullptr, 0);
}

std::string tail_of(const fs::path& log) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string s = ss.str();
    if (s.size() > 400) s = s.substr(s.size() - 400);
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

// Forks a vqpu-server and waits for the port it reports on the ready pipe.
Spawned spawn_server(const fs::path& binary, std::vector<std::string> args, const fs::path& log,
                     std::chrono::milliseconds timeout) {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) throw Error(ErrorCode::Internal, "pipe failed");
    args.push_back("--ready-fd");
    args.push_back(std::to_string(fds[1]));
    std::vector<char*> argv;
    const std::string bin = binary.string();
    argv.push_back(const_cast<char*>(bin.c_str()));
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    const int log_fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    const int null_fd = ::open("/dev/null", O_RDONLY | O_CLOEXEC);

    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw Error(ErrorCode::Internal, "fork failed");
    }
    if (pid == 0) {
        ::setsid();
        if (null_fd >= 0) ::dup2(null_fd, 0);
        if (log_fd >= 0) {
            ::dup2(log_fd, 1);
            ::dup2(log_fd, 2);
        }
        ::fcntl(fds[1], F_SETFD, 0);
        ::execv(argv[0], argv.data());
        ::_exit(127);
    }
    ::close(fds[1]);
    if (log_fd >= 0) ::close(log_fd);
    if (null_fd >= 0) ::close(null_fd);

    std::string text;
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) break;
        pollfd p{fds[0], POLLIN, 0};
        if (::poll(&p, 1, static_cast<int>(left.count())) <= 0) break;
        char buf[64];
        const ssize_t n = ::read(fds[0], buf, sizeof buf);
        if (n <= 0) break;
        text.append(buf, static_cast<std::size_t>(n));
        if (text.find('\n') != std::string::npos) break;
    }
    ::close(fds[0]);
    if (text.find('\n') == std::string::npos) {
        kill_and_reap(pid);
        const std::string why = tail_of(log);
        if (why.find("BindFailure") != std::string::npos) {
            throw Error(ErrorCode::PortExhausted, "vqpu-server could not bind: " + why);
        }
        throw Error(ErrorCode::Internal, "vqpu-server did not start: " + why);
    }
    return {static_cast<int>(pid), static_cast<std::uint16_t>(std::stoul(text))};
}

bool probe(const std::string& host, std::uint16_t port, std::chrono::milliseconds budget,
           json* status = nullptr) {
    try {
        net::RpcClient rpc(net::Endpoint{host, port}, budget);
        const json r = rpc.request({{"type", "status"}});
        if (r.value("type", "") != "status") return false;
        if (status) *status = r;
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::vector<std::uint16_t> free_ports(std::pair<std::uint16_t, std::uint16_t> range,
                                      const std::vector<RegistryEntry>& taken, std::size_t need) {
    std::set<std::uint16_t> used;
    for (const auto& e : taken) used.insert(e.port);
    std::vector<std::uint16_t> out;
    for (std::uint32_t p = range.first; p <= range.second && out.size() < need; ++p) {
        if (used.count(static_cast<std::uint16_t>(p))) continue;
        try {
            net::Listener::bind("127.0.0.1", static_cast<std::uint16_t>(p));
            out.push_back(static_cast<std::uint16_t>(p));
        } catch (const Error&) {
        }
    }
    if (out.size() < need) {
        throw Error(ErrorCode::PortExhausted,
                    "need " + std::to_string(need) + " free ports in " + std::to_string(range.first) +
                        "-" + std::to_string(range.second) + ", found " + std::to_string(out.size()));
    }
    return out;
}

bool wait_gone(int pid, std::chrono::milliseconds limit) {
    const auto deadline = std::chrono::steady_clock::now() + limit;
    for (;;) {
        ::waitpid(pid, nullptr, WNOHANG);
        if (!process_alive(pid)) return true;
        if (std::chrono::steady_clock::now() > deadline) return false;
        std::this_thread::sleep_for(20ms);
    }
}

}  // namespace

QraiseResult qraise(const QraiseOptions& opts) {
    if (opts.classical_comm && opts.quantum_comm) {
        throw Error(ErrorCode::ConflictingFlags, "--classical_comm and --quantum_comm are exclusive");
    }
    if (opts.noise_prop) throw Error(ErrorCode::UnsupportedOption, "--noise-prop: unsupported in this build");
    if (opts.sim && *opts.sim != "statevector") {
        throw Error(ErrorCode::UnsupportedOption, "--sim " + *opts.sim + ": only statevector is available");
    }
    if (opts.n == 0) throw Error(ErrorCode::InvalidArgument, "-n must be >= 1");
    if (opts.n_nodes && *opts.n_nodes == 0) throw Error(ErrorCode::InvalidArgument, "--n_nodes must be >= 1");
    const std::uint64_t ttl = parse_ttl(opts.ttl);
    std::string backend_path;
    if (opts.backend) {
        load_backend_file(*opts.backend);
        backend_path = fs::absolute(*opts.backend).string();
    }
    const CommMode comm = opts.quantum_comm     ? CommMode::Quantum
                          : opts.classical_comm ? CommMode::Classical
                                                : CommMode::None;
    const fs::path binary = resolve_server(opts.server_binary);

    Registry reg(opts.home);
    std::vector<RegistryEntry> live = reg.load();
    std::erase_if(live, [](const RegistryEntry& e) { return !process_alive(e.pid); });
    auto family_taken = [&](const std::string& f) {
        return std::any_of(live.begin(), live.end(), [&](const RegistryEntry& e) { return e.family == f; });
    };
    std::string family;
    if (opts.name) {
        if (opts.name->empty()) throw Error(ErrorCode::InvalidArgument, "--name must not be empty");
        if (family_taken(*opts.name)) throw Error(ErrorCode::DuplicateFamilyName, *opts.name);
        family = *opts.name;
    } else {
        for (std::size_t i = 1;; ++i) {
            family = "family_" + std::to_string(i);
            if (!family_taken(family)) break;
        }
    }

    const std::size_t total = opts.n + (comm == CommMode::Quantum ? 1 : 0);
    std::vector<std::uint16_t> ports(total, 0);
    if (opts.ports) ports = free_ports(*opts.ports, live, total);

    const fs::path logs = opts.home / "logs";
    fs::create_directories(logs);
    std::vector<RegistryEntry> entries;
    std::vector<int> pids;
    auto base_args = [&](const std::string& role, const std::string& id, std::size_t index,
                         std::uint16_t port) {
        std::vector<std::string> a = {"--role", role, "--family", family, "--index",
                                      std::to_string(index), "--id", id, "--host", "127.0.0.1",
                                      "--port", std::to_string(port), "--comm",
                                      std::string(comm_mode_name(comm)), "--ttl", std::to_string(ttl),
                                      "--home", opts.home.string()};
        if (!backend_path.empty()) {
            a.push_back("--backend");
            a.push_back(backend_path);
        }
        return a;
    };
    auto make_entry = [&](const std::string& id, const std::string& kind, std::size_t index,
                          const Spawned& s) {
        RegistryEntry e;
        e.family = family;
        e.vqpu_id = id;
        e.kind = kind;
        e.port = s.port;
        e.backend_path = backend_path;
        e.comm_mode = comm;
        e.co_located = opts.co_located;
        e.node = "node" + std::to_string(index % opts.n_nodes.value_or(1));
        e.pid = s.pid;
        e.raised_at = utc_now();
        e.ttl_s = ttl;
        e.cores = opts.cores;
        e.mem_per_qpu = opts.mem_per_qpu;
        e.n_nodes = opts.n_nodes;
        return e;
    };

    try {
        std::optional<std::string> executor;
        std::size_t slot = 0;
        if (comm == CommMode::Quantum) {
            const std::string id = family + "_executor";
            const Spawned s = spawn_server(binary, base_args("executor", id, 0, ports[slot++]),
                                           logs / (id + ".log"), opts.ready_timeout);
            pids.push_back(s.pid);
            entries.push_back(make_entry(id, "executor", 0, s));
            executor = entries.back().address();
        }
        for (std::size_t i = 0; i < opts.n; ++i) {
            const std::string id = family + "_" + std::to_string(i);
            auto args = base_args("vqpu", id, i, ports[slot++]);
            if (executor) {
                args.push_back("--executor");
                args.push_back(*executor);
            }
            const Spawned s = spawn_server(binary, args, logs / (id + ".log"), opts.ready_timeout);
            pids.push_back(s.pid);
            entries.push_back(make_entry(id, "vqpu", i, s));
            entries.back().executor_endpoint = executor;
        }
        const auto deadline = std::chrono::steady_clock::now() + opts.ready_timeout;
        for (const auto& e : entries) {
            while (!probe(e.host, e.port, 500ms)) {
                if (std::chrono::steady_clock::now() > deadline) {
                    throw Error(ErrorCode::Internal, e.vqpu_id + " did not answer status");
                }
                std::this_thread::sleep_for(20ms);
            }
        }
        reg.update([&](std::vector<RegistryEntry>& all) {
            for (const auto& e : all) {
                if (e.family == family && process_alive(e.pid)) {
                    throw Error(ErrorCode::DuplicateFamilyName, family);
                }
            }
            std::erase_if(all, [&](const RegistryEntry& e) { return e.family == family; });
            all.insert(all.end(), entries.begin(), entries.end());
        });
    } catch (...) {
        for (int pid : pids) kill_and_reap(pid);
        throw;
    }
    return {family, entries};
}

QdropResult qdrop(const std::optional<std::string>& family, const fs::path& home) {
    Registry reg(home);
    std::vector<RegistryEntry> selected = reg.load();
    if (family) {
        std::erase_if(selected, [&](const RegistryEntry& e) { return e.family != *family; });
    }
    QdropResult out;
    if (selected.empty()) {
        out.warnings.push_back(family ? "no family named " + *family : "no vQPUs registered");
        return out;
    }
    std::vector<int> was_alive;
    for (const auto& e : selected) {
        if (!process_alive(e.pid) || e.pid == ::getpid()) continue;
        was_alive.push_back(e.pid);
        try {
            net::RpcClient rpc(net::Endpoint{e.host, e.port}, 500ms);
            rpc.request({{"type", "shutdown"}});
        } catch (const Error&) {
        }
    }
    for (int pid : was_alive) {
        if (wait_gone(pid, 3s)) continue;
        ::kill(pid, SIGTERM);
        if (wait_gone(pid, 1s)) continue;
        ::kill(pid, SIGKILL);
        if (!wait_gone(pid, 1s)) out.warnings.push_back("pid " + std::to_string(pid) + " survived SIGKILL");
    }
    out.terminated = was_alive.size();
    std::vector<std::string> ids;
    for (const auto& e : selected) ids.push_back(e.vqpu_id);
    reg.remove(ids);
    return out;
}

std::vector<QinfoRow> qinfo(const std::optional<std::string>& family, const fs::path& home,
                            std::chrono::milliseconds budget) {
    Registry reg(home);
    std::vector<QinfoRow> rows;
    std::vector<std::string> dead;
    for (const auto& e : reg.load()) {
        if (family && e.family != *family) continue;
        QinfoRow row;
        row.entry = e;
        json status;
        if (probe(e.host, e.port, budget, &status) && status.value("pid", 0) == e.pid) {
            row.alive = true;
            row.detail = status.value("state", "");
        } else {
            row.detail = "stale";
        }
        if (!process_alive(e.pid)) {
            row.alive = false;
            row.detail = "stale (process gone, pruned)";
            dead.push_back(e.vqpu_id);
        }
        rows.push_back(std::move(row));
    }
    if (!dead.empty()) reg.remove(dead);
    return rows;
}

json qinfo_to_json(const std::vector<QinfoRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json j = entry_to_json(r.entry);
        j["alive"] = r.alive;
        j["status"] = r.detail;
        out.push_back(std::move(j));
    }
    return out;
}

std::string format_qinfo(const std::vector<QinfoRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(16) << "FAMILY" << std::setw(24) << "ID" << std::setw(10) << "KIND"
        << std::setw(22) << "ENDPOINT" << std::setw(11) << "COMM" << std::setw(8) << "NODE"
        << std::setw(9) << "PID" << "STATUS\n";
    for (const auto& r : rows) {
        const auto& e = r.entry;
        out << std::left << std::setw(16) << e.family << std::setw(24) << e.vqpu_id << std::setw(10)
            << e.kind << std::setw(22) << e.address() << std::setw(11) << comm_mode_name(e.comm_mode)
            << std::setw(8) << e.node << std::setw(9) << e.pid
            << (r.alive ? "alive (" + r.detail + ")" : r.detail) << "\n";
    }
    return out.str();
}

}  // namespace vqpu
