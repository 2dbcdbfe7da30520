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

#include <chrono>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vqpu/algorithms/qpe.hpp"
#include "vqpu/error.hpp"
#include "vqpu/orchestrator/lifecycle.hpp"
#include "vqpu/sdk/sdk.hpp"

using namespace vqpu;

namespace {

struct Row {
    std::string model;
    std::size_t n_vqpus = 0;
    std::uint64_t shots_per_vqpu = 0;
    PhaseEstimate estimate;
    double execution_time_s = 0;
};

struct Settings {
    std::size_t n = 16;
    std::size_t vqpus = 4;
    std::uint64_t shots = 25000;
    std::uint64_t seed = 1;
    double theta = 2.0;
    std::string family;
    bool json = false;
};

// Raises a private family unless one was named, and drops it afterwards.
class Family {
public:
    Family(const Settings& s, std::size_t n, CommMode comm) {
        if (!s.family.empty()) {
            name_ = s.family;
            return;
        }
        QraiseOptions o;
        o.n = n;
        o.ttl = "01:00:00";
        o.classical_comm = comm == CommMode::Classical;
        o.quantum_comm = comm == CommMode::Quantum;
        name_ = qraise(o).family;
        owned_ = true;
    }
    ~Family() {
        if (owned_) qdrop(name_);
    }
    Family(const Family&) = delete;
    Family& operator=(const Family&) = delete;

    std::vector<QpuHandle> qpus(std::size_t need) const {
        auto all = get_qpus(true, name_);
        if (all.size() < need) {
            throw Error(ErrorCode::NotEnoughQpus, "family " + name_ + " has " +
                                                      std::to_string(all.size()) + " vQPUs, need " +
                                                      std::to_string(need));
        }
        all.erase(all.begin() + static_cast<std::ptrdiff_t>(need), all.end());
        return all;
    }

private:
    std::string name_;
    bool owned_ = false;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

QpeConfig qpe_config(const Settings& s) {
    QpeConfig cfg;
    cfg.n_ancilla = s.n;
    cfg.theta = s.theta;
    cfg.shots = s.shots;
    return cfg;
}

RunOptions run_options(const Settings& s) {
    RunOptions o;
    o.shots = s.shots;
    o.seed = s.seed;
    return o;
}

Row no_comm(const Settings& s) {
    Family fam(s, s.vqpus, CommMode::None);
    const auto qpus = fam.qpus(s.vqpus);
    const Circuit c = build_qpe(qpe_config(s));
    const auto t0 = std::chrono::steady_clock::now();
    auto jobs = distribute_shots(c, qpus, s.shots * s.vqpus, run_options(s));
    const Counts total = aggregate_counts(gather(jobs));
    return {"No comm.", s.vqpus, s.shots, extract_phase(total, s.n), seconds_since(t0)};
}

Row classical(const Settings& s) {
    Family fam(s, s.n, CommMode::Classical);
    const auto qpus = fam.qpus(s.n);
    const IpeaChain chain = build_ipea_chain(qpe_config(s));
    const auto t0 = std::chrono::steady_clock::now();
    auto jobs = run_distributed(chain.circuits, qpus, run_options(s));
    std::vector<int> bits;
    for (const auto& r : gather(jobs)) bits.push_back(most_frequent_bit(r.counts));
    return {"Classical comm.", s.n, s.shots, ipea_bits_to_phase(bits, s.n), seconds_since(t0)};
}

Row quantum(const Settings& s) {
    Family fam(s, 2, CommMode::Quantum);
    const auto qpus = fam.qpus(2);
    auto [ctl, tgt] = build_distributed_qpe(qpe_config(s));
    const auto t0 = std::chrono::steady_clock::now();
    auto jobs = run_distributed({ctl, tgt}, qpus, run_options(s));
    const auto results = gather(jobs);
    return {"Quantum comm.", 2, s.shots, extract_phase(results[0].counts, s.n), seconds_since(t0)};
}

void print(const Row& r, bool as_json) {
    if (as_json) {
        nlohmann::json j{{"model", r.model},
                         {"n_vqpus", r.n_vqpus},
                         {"shots_per_vqpu", r.shots_per_vqpu},
                         {"xi", r.estimate.xi},
                         {"phi_hat", r.estimate.phi_hat},
                         {"execution_time_s", r.execution_time_s}};
        std::cout << j.dump() << "\n";
        return;
    }
    std::cout << std::left << std::setw(18) << "model" << std::setw(9) << "n_vqpus" << std::setw(16)
              << "shots_per_vqpu" << std::setw(22) << "phi_hat"
              << "execution_time_s\n";
    std::cout << std::setw(18) << r.model << std::setw(9) << r.n_vqpus << std::setw(16)
              << r.shots_per_vqpu << std::setw(22) << std::setprecision(16) << r.estimate.phi_hat
              << std::fixed << std::setprecision(3) << r.execution_time_s << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase estimation of U = Rz(2 theta) under the three communication models"};
    app.require_subcommand(1);
    Settings s;
    auto common = [&s](CLI::App* sub) {
        sub->add_option("-n", s.n, "phase bits");
        sub->add_option("--shots", s.shots, "shots per vQPU");
        sub->add_option("--seed", s.seed);
        sub->add_option("--theta", s.theta, "rotation angle; phi = theta / (2 pi)");
        sub->add_option("--family", s.family, "use a running family instead of raising one");
        sub->add_flag("--json", s.json);
    };
    auto* nc = app.add_subcommand("qpe-no-comm", "textbook QPE with shots split over vQPUs");
    common(nc);
    nc->add_option("--vqpus", s.vqpus);
    auto* cl = app.add_subcommand("qpe-classical", "IPEA, one vQPU per phase bit");
    common(cl);
    auto* qu = app.add_subcommand("qpe-quantum", "QPE split over two vQPUs with telegates");
    common(qu);
    CLI11_PARSE(app, argc, argv);

    try {
        Row row;
        if (*nc) {
            row = no_comm(s);
        } else if (*cl) {
            if (!cl->count("--shots")) s.shots = 10000;
            row = classical(s);
        } else {
            if (!qu->count("-n")) s.n = 8;
            if (!qu->count("--shots")) s.shots = 10000;
            row = quantum(s);
        }
        print(row, s.json);
    } catch (const Error& e) {
        std::cerr << "qpe_demo: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
