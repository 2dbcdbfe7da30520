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
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqpu/server/protocol.hpp"

namespace vqpu {

struct RegistryEntry {
    std::string family;
    std::string vqpu_id;
    std::string kind = "vqpu";  // vqpu | executor
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    std::string backend_path;
    CommMode comm_mode = CommMode::None;
    bool co_located = false;
    std::string node = "node0";
    int pid = 0;
    std::string raised_at;
    std::uint64_t ttl_s = 0;
    std::optional<std::string> executor_endpoint;
    // Advisory resource requests; recorded, never enforced.
    std::optional<std::size_t> cores;
    std::optional<std::string> mem_per_qpu;
    std::optional<std::size_t> n_nodes;

    std::string address() const { return host + ":" + std::to_string(port); }

    friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

nlohmann::json entry_to_json(const RegistryEntry& e);
/// Throws SchemaViolation.
RegistryEntry entry_from_json(const nlohmann::json& j);

/// $CUNQA_HOME, else ~/.cunqa.
std::filesystem::path registry_home();
/// $VQPU_NODE, else "node0".
std::string current_node();

/// registry.json under `home`, guarded by an flock on registry.lock.
/// Writes go to a temporary file that is renamed into place.
class Registry {
public:
    explicit Registry(std::filesystem::path home = registry_home());

    const std::filesystem::path& home() const { return home_; }
    std::filesystem::path file() const { return home_ / "registry.json"; }

    /// Snapshot under a shared lock. A missing file is an empty registry.
    std::vector<RegistryEntry> load() const;

    /// Read-modify-write under an exclusive lock.
    void update(const std::function<void(std::vector<RegistryEntry>&)>& fn) const;

    /// Removes the entries whose vqpu_id is in `ids`; returns how many.
    std::size_t remove(const std::vector<std::string>& ids) const;

private:
    std::filesystem::path home_;
};

/// "HH:MM:SS" -> seconds. Throws InvalidArgument.
std::uint64_t parse_ttl(const std::string& text);

/// True while `pid` exists and is not a zombie.
bool process_alive(int pid);

}  // namespace vqpu
