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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vqpu/error.hpp"
#include "vqpu/orchestrator/lifecycle.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Raise a family of vQPU processes on this host"};
    vqpu::QraiseOptions opts;
    std::string backend, sim, name, mem;
    std::size_t cores = 0, n_nodes = 0;
    app.add_option("-n", opts.n, "number of vQPUs")->required();
    app.add_option("-t", opts.ttl, "lifetime HH:MM:SS")->required();
    app.add_option("--backend", backend, "backend JSON file");
    app.add_option("--sim", sim, "simulator");
    app.add_flag("--classical_comm", opts.classical_comm);
    app.add_flag("--quantum_comm", opts.quantum_comm);
    app.add_flag("--co-located", opts.co_located);
    app.add_option("--name", name, "family name");
    app.add_option("-c", cores, "cores per vQPU (advisory)");
    app.add_option("--mem-per-qpu", mem, "memory per vQPU (advisory)");
    app.add_option("--n_nodes", n_nodes, "node labels to spread over");
    app.add_flag("--noise-prop", opts.noise_prop);
    CLI11_PARSE(app, argc, argv);

    if (!backend.empty()) opts.backend = backend;
    if (!sim.empty()) opts.sim = sim;
    if (!name.empty()) opts.name = name;
    if (cores > 0) opts.cores = cores;
    if (!mem.empty()) opts.mem_per_qpu = mem;
    if (app.count("--n_nodes")) opts.n_nodes = n_nodes;
    try {
        const vqpu::QraiseResult r = vqpu::qraise(opts);
        std::cout << r.family << "\n";
        for (const auto& e : r.entries) {
            std::cout << "  " << e.vqpu_id << " " << e.kind << " " << e.address() << "\n";
        }
    } catch (const vqpu::Error& e) {
        std::cerr << "qraise: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
