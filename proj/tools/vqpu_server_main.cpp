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

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vqpu/circuit/backend.hpp"
#include "vqpu/error.hpp"
#include "vqpu/orchestrator/registry.hpp"
#include "vqpu/server/server.hpp"

int main(int argc, char** argv) {
    CLI::App app{"vQPU process: serves the task protocol on a TCP port"};
    std::string role = "vqpu", comm = "none", host = "127.0.0.1", id, backend, executor, home;
    std::string family = "default", sim = "statevector";
    std::size_t index = 0, queue_limit = 64;
    std::uint16_t port = 0;
    std::uint64_t ttl = 0;
    int ready_fd = -1;
    app.add_option("--role", role)->check(CLI::IsMember({"vqpu", "executor"}));
    app.add_option("--family", family);
    app.add_option("--index", index);
    app.add_option("--id", id, "registry id removed on exit");
    app.add_option("--host", host);
    app.add_option("--port", port);
    app.add_option("--comm", comm)->check(CLI::IsMember({"none", "classical", "quantum"}));
    app.add_option("--backend", backend, "backend JSON file");
    app.add_option("--executor", executor, "executor host:port (quantum mode)");
    app.add_option("--ttl", ttl, "lifetime in seconds, 0 = unlimited");
    app.add_option("--sim", sim)->check(CLI::IsMember({"statevector"}));
    app.add_option("--queue-limit", queue_limit);
    app.add_option("--ready-fd", ready_fd, "descriptor that receives the bound port");
    app.add_option("--home", home, "registry directory");
    CLI11_PARSE(app, argc, argv);

    vqpu::VqpuConfig cfg;
    cfg.role = role == "executor" ? vqpu::ServerRole::Executor : vqpu::ServerRole::Vqpu;
    cfg.family = family;
    cfg.index = index;
    cfg.host = host;
    cfg.port = port;
    cfg.comm_mode = vqpu::comm_mode_from_name(comm);
    cfg.simulator = sim;
    cfg.queue_limit = queue_limit;
    if (ttl > 0) cfg.ttl = std::chrono::seconds(ttl);

    try {
        if (!backend.empty()) cfg.backend = vqpu::load_backend_file(backend);
        if (!executor.empty()) cfg.executor = vqpu::net::Endpoint::parse(executor);
        vqpu::VqpuServer server(cfg);
        std::cerr << "vqpu-server " << role << " " << family << "/" << index << " listening on "
                  << server.address() << std::endl;
        if (ready_fd >= 0) {
            const std::string line = std::to_string(server.port()) + "\n";
            [[maybe_unused]] auto w = ::write(ready_fd, line.data(), line.size());
            ::close(ready_fd);
        }
        server.run();
        std::cerr << (server.expired() ? "lifetime expired" : "shutdown requested") << std::endl;
        if (!id.empty()) {
            vqpu::Registry(home.empty() ? vqpu::registry_home() : std::filesystem::path(home)).remove({id});
        }
        std::cerr.flush();
        // A shutdown may arrive mid-simulation; do not wait for the worker.
        std::_Exit(0);
    } catch (const vqpu::Error& e) {
        std::cerr << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "Internal: " << e.what() << std::endl;
        return 1;
    }
}
