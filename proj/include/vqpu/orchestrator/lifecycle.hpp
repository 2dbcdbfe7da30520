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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vqpu/orchestrator/registry.hpp"

namespace vqpu {

struct QraiseOptions {
    std::size_t n = 1;
    std::string ttl = "00:10:00";
    std::optional<std::string> backend;
    std::optional<std::string> sim;
    bool classical_comm = false;
    bool quantum_comm = false;
    bool co_located = false;
    std::optional<std::string> name;
    std::optional<std::size_t> cores;
    std::optional<std::string> mem_per_qpu;
    std::optional<std::size_t> n_nodes;
    bool noise_prop = false;

    /// Inclusive port range to allocate from; unset lets the OS pick.
    std::optional<std::pair<std::uint16_t, std::uint16_t>> ports;
    /// vqpu-server executable; empty searches next to this program, then PATH.
    std::filesystem::path server_binary;
    std::filesystem::path home = registry_home();
    std::chrono::milliseconds ready_timeout{10000};
};

struct QraiseResult {
    std::string family;
    std::vector<RegistryEntry> entries;
};

/// Spawns the family and registers it once every member answers status.
/// Throws ConflictingFlags, DuplicateFamilyName, UnsupportedOption,
/// BackendFileInvalid, PortExhausted, InvalidArgument.
QraiseResult qraise(const QraiseOptions& opts);

struct QdropResult {
    std::size_t terminated = 0;
    std::vector<std::string> warnings;
};

/// Stops every member of `family` (all families when nullopt) and removes
/// their entries. Unknown families terminate nothing.
QdropResult qdrop(const std::optional<std::string>& family,
                  const std::filesystem::path& home = registry_home());

struct QinfoRow {
    RegistryEntry entry;
    bool alive = false;
    std::string detail;  // status state or probe failure
};

/// Probes each entry (200 ms budget) and prunes entries whose process is gone.
std::vector<QinfoRow> qinfo(const std::optional<std::string>& family = std::nullopt,
                            const std::filesystem::path& home = registry_home(),
                            std::chrono::milliseconds budget = std::chrono::milliseconds(200));

nlohmann::json qinfo_to_json(const std::vector<QinfoRow>& rows);
std::string format_qinfo(const std::vector<QinfoRow>& rows);

}  // namespace vqpu
