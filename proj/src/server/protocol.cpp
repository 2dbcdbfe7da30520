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

#include "vqpu/server/protocol.hpp"

#include "vqpu/error.hpp"

namespace vqpu {

using nlohmann::json;

std::string_view comm_mode_name(CommMode m) {
    switch (m) {
        case CommMode::None: return "none";
        case CommMode::Classical: return "classical";
        case CommMode::Quantum: return "quantum";
    }
    return "none";
}

CommMode comm_mode_from_name(std::string_view name) {
    if (name == "none") return CommMode::None;
    if (name == "classical") return CommMode::Classical;
    if (name == "quantum") return CommMode::Quantum;
    throw Error(ErrorCode::InvalidArgument, "unknown comm mode '" + std::string(name) + "'");
}

std::string_view exec_mode_name(ExecMode m) {
    switch (m) {
        case ExecMode::Auto: return "auto";
        case ExecMode::Sampled: return "sampled";
        case ExecMode::ShotLoop: return "shot_loop";
    }
    return "auto";
}

ExecMode exec_mode_from_name(std::string_view name) {
    if (name == "auto") return ExecMode::Auto;
    if (name == "sampled") return ExecMode::Sampled;
    if (name == "shot_loop") return ExecMode::ShotLoop;
    throw Error(ErrorCode::SchemaViolation, "config.mode: unknown mode '" + std::string(name) + "'");
}

json run_config_to_json(const RunConfig& c) {
    json j{{"shots", c.shots}, {"mode", std::string(exec_mode_name(c.mode))}};
    if (c.seed) j["seed"] = *c.seed;
    if (!c.params.empty()) j["params"] = c.params;
    if (c.distributed) {
        j["distributed"] = {{"group", c.distributed->group},
                            {"plan", c.distributed->plan},
                            {"k", c.distributed->k},
                            {"index", c.distributed->index}};
    }
    return j;
}

namespace {

[[noreturn]] void bad(const std::string& path) {
    throw Error(ErrorCode::SchemaViolation, path + ": bad or missing");
}

std::uint64_t get_uint(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_number_integer() ||
        (!j[key].is_number_unsigned() && j[key].get<long long>() < 0)) {
        bad(path + key);
    }
    return j[key].get<std::uint64_t>();
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) bad("config");
    for (const auto& [key, value] : j.items()) {
        if (key != "shots" && key != "seed" && key != "mode" && key != "params" &&
            key != "distributed") {
            throw Error(ErrorCode::SchemaViolation, "config." + key + ": unknown field");
        }
    }
    RunConfig c;
    c.shots = get_uint(j, "shots", "config.");
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = get_uint(j, "seed", "config.");
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) bad("config.mode");
        c.mode = exec_mode_from_name(j["mode"].get<std::string>());
    }
    if (j.contains("params")) {
        if (!j["params"].is_array()) bad("config.params");
        for (const auto& p : j["params"]) {
            if (!p.is_number()) bad("config.params");
            c.params.push_back(p.get<double>());
        }
    }
    if (j.contains("distributed")) {
        const json& d = j["distributed"];
        if (!d.is_object() || !d.contains("group") || !d["group"].is_string()) {
            bad("config.distributed.group");
        }
        DistributedSpec spec;
        spec.group = d["group"].get<std::string>();
        if (d.contains("plan")) {
            if (!d["plan"].is_object()) bad("config.distributed.plan");
            for (const auto& [id, addr] : d["plan"].items()) {
                if (!addr.is_string()) bad("config.distributed.plan." + id);
                spec.plan[id] = addr.get<std::string>();
            }
        }
        if (d.contains("k")) spec.k = get_uint(d, "k", "config.distributed.");
        if (d.contains("index")) spec.index = get_uint(d, "index", "config.distributed.");
        c.distributed = std::move(spec);
    }
    return c;
}

json result_to_json(const ResultRecord& r) {
    return json{{"type", "result"},
                {"job_id", r.job_id},
                {"counts", r.counts},
                {"time_taken", r.time_taken},
                {"metadata", r.metadata}};
}

ResultRecord result_from_json(const json& j) {
    if (!j.is_object() || j.value("type", "") != "result") bad("result");
    ResultRecord r;
    if (!j.contains("job_id") || !j["job_id"].is_string()) bad("job_id");
    r.job_id = j["job_id"].get<std::string>();
    if (!j.contains("counts") || !j["counts"].is_object()) bad("counts");
    for (const auto& [k, v] : j["counts"].items()) {
        if (!v.is_number_integer() || v.get<long long>() < 0) bad("counts." + k);
        r.counts[k] = v.get<std::uint64_t>();
    }
    if (!j.contains("time_taken") || !j["time_taken"].is_number()) bad("time_taken");
    r.time_taken = j["time_taken"].get<double>();
    if (j.contains("metadata")) r.metadata = j["metadata"];
    return r;
}

}  // namespace vqpu
