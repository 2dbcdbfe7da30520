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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vqpu/sim/engine.hpp"

namespace vqpu {

enum class CommMode { None, Classical, Quantum };
std::string_view comm_mode_name(CommMode m);
/// Throws InvalidArgument.
CommMode comm_mode_from_name(std::string_view name);

enum class ExecMode { Auto, Sampled, ShotLoop };
std::string_view exec_mode_name(ExecMode m);
ExecMode exec_mode_from_name(std::string_view name);

/// Participation of one circuit in a distributed job.
struct DistributedSpec {
    std::string group;                          // shared id of the distributed job
    std::map<std::string, std::string> plan;    // circuit id -> vQPU host:port (classical)
    std::size_t k = 0;                          // number of parts (quantum)
    std::size_t index = 0;                      // this part's position (quantum)

    friend bool operator==(const DistributedSpec&, const DistributedSpec&) = default;
};

struct RunConfig {
    std::uint64_t shots = 1024;
    std::optional<std::uint64_t> seed;
    ExecMode mode = ExecMode::Auto;
    /// Positional values for the circuit's symbolic parameter slots.
    std::vector<double> params;
    std::optional<DistributedSpec> distributed;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json run_config_to_json(const RunConfig& c);
/// Throws SchemaViolation.
RunConfig run_config_from_json(const nlohmann::json& j);

struct ResultRecord {
    std::string job_id;
    Counts counts;
    /// Simulation wall time in seconds, queue wait excluded.
    double time_taken = 0.0;
    nlohmann::json metadata = nlohmann::json::object();
};

/// {"type":"result","job_id","counts","time_taken","metadata"}.
nlohmann::json result_to_json(const ResultRecord& r);
ResultRecord result_from_json(const nlohmann::json& j);

}  // namespace vqpu
