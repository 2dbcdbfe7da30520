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

#include "vqpu/orchestrator/registry.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "vqpu/error.hpp"

namespace vqpu {

using nlohmann::json;

namespace {

class FileLock {
public:
    FileLock(const std::filesystem::path& path, int op) {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0) throw Error(ErrorCode::Internal, "cannot open " + path.string());
        while (::flock(fd_, op) != 0) {
            if (errno != EINTR) {
                ::close(fd_);
                throw Error(ErrorCode::Internal, "cannot lock " + path.string());
            }
        }
    }
    ~FileLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

std::vector<RegistryEntry> read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return {};
    std::stringstream ss;
    ss << in.rdbuf();
    if (ss.str().empty()) return {};
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
    }
    if (!j.is_array()) throw Error(ErrorCode::SchemaViolation, path.string() + ": not an array");
    std::vector<RegistryEntry> out;
    for (const auto& e : j) out.push_back(entry_from_json(e));
    return out;
}

void write_file(const std::filesystem::path& path, const std::vector<RegistryEntry>& entries) {
    json j = json::array();
    for (const auto& e : entries) j.push_back(entry_to_json(e));
    const auto tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << j.dump(2) << "\n";
        out.flush();
        if (!out) throw Error(ErrorCode::Internal, "cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

template <typename T>
T field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw Error(ErrorCode::SchemaViolation, std::string(name) + ": missing");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::SchemaViolation, std::string(name) + ": wrong type");
    }
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return field<T>(j, name);
}

}  // namespace

json entry_to_json(const RegistryEntry& e) {
    json j = {{"family", e.family},
              {"vqpu_id", e.vqpu_id},
              {"kind", e.kind},
              {"host", e.host},
              {"port", e.port},
              {"backend_path", e.backend_path},
              {"comm_mode", comm_mode_name(e.comm_mode)},
              {"co_located", e.co_located},
              {"node", e.node},
              {"pid", e.pid},
              {"raised_at", e.raised_at},
              {"ttl", e.ttl_s},
              {"executor_endpoint", nullptr},
              {"cores", nullptr},
              {"mem_per_qpu", nullptr},
              {"n_nodes", nullptr}};
    if (e.executor_endpoint) j["executor_endpoint"] = *e.executor_endpoint;
    if (e.cores) j["cores"] = *e.cores;
    if (e.mem_per_qpu) j["mem_per_qpu"] = *e.mem_per_qpu;
    if (e.n_nodes) j["n_nodes"] = *e.n_nodes;
    return j;
}

RegistryEntry entry_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "registry entry is not an object");
    RegistryEntry e;
    e.family = field<std::string>(j, "family");
    e.vqpu_id = field<std::string>(j, "vqpu_id");
    e.kind = j.value("kind", "vqpu");
    e.host = field<std::string>(j, "host");
    e.port = field<std::uint16_t>(j, "port");
    e.backend_path = j.value("backend_path", "");
    try {
        e.comm_mode = comm_mode_from_name(field<std::string>(j, "comm_mode"));
    } catch (const Error& err) {
        throw Error(ErrorCode::SchemaViolation, "comm_mode: " + err.detail());
    }
    e.co_located = j.value("co_located", false);
    e.node = j.value("node", "node0");
    e.pid = field<int>(j, "pid");
    e.raised_at = j.value("raised_at", "");
    e.ttl_s = j.value("ttl", std::uint64_t{0});
    e.executor_endpoint = optional_field<std::string>(j, "executor_endpoint");
    e.cores = optional_field<std::size_t>(j, "cores");
    e.mem_per_qpu = optional_field<std::string>(j, "mem_per_qpu");
    e.n_nodes = optional_field<std::size_t>(j, "n_nodes");
    return e;
}

std::filesystem::path registry_home() {
    if (const char* h = std::getenv("CUNQA_HOME"); h && *h) return h;
    const char* home = std::getenv("HOME");
    return std::filesystem::path(home && *home ? home : "/tmp") / ".cunqa";
}

std::string current_node() {
    const char* n = std::getenv("VQPU_NODE");
    return n && *n ? n : "node0";
}

Registry::Registry(std::filesystem::path home) : home_(std::move(home)) {}

std::vector<RegistryEntry> Registry::load() const {
    std::filesystem::create_directories(home_);
    FileLock lock(home_ / "registry.lock", LOCK_SH);
    return read_file(file());
}

void Registry::update(const std::function<void(std::vector<RegistryEntry>&)>& fn) const {
    std::filesystem::create_directories(home_);
    FileLock lock(home_ / "registry.lock", LOCK_EX);
    auto entries = read_file(file());
    fn(entries);
    write_file(file(), entries);
}

std::size_t Registry::remove(const std::vector<std::string>& ids) const {
    std::size_t removed = 0;
    update([&](std::vector<RegistryEntry>& entries) {
        const auto before = entries.size();
        std::erase_if(entries, [&](const RegistryEntry& e) {
            return std::find(ids.begin(), ids.end(), e.vqpu_id) != ids.end();
        });
        removed = before - entries.size();
    });
    return removed;
}

std::uint64_t parse_ttl(const std::string& text) {
    static const std::regex re(R"((\d+):([0-5]\d):([0-5]\d))");
    std::smatch m;
    if (!std::regex_match(text, m, re)) {
        throw Error(ErrorCode::InvalidArgument, "ttl '" + text + "' is not HH:MM:SS");
    }
    return std::stoull(m[1]) * 3600 + std::stoull(m[2]) * 60 + std::stoull(m[3]);
}

bool process_alive(int pid) {
    if (pid <= 0) return false;
    if (::kill(pid, 0) != 0 && errno == ESRCH) return false;
    std::ifstream stat("/proc/" + std::to_string(pid) + "/stat");
    std::string content;
    if (!std::getline(stat, content)) return false;
    // The state letter follows the parenthesised command name.
    const auto close = content.rfind(')');
    if (close == std::string::npos || close + 2 >= content.size()) return true;
    const char state = content[close + 2];
    return state != 'Z' && state != 'X';
}

}  // namespace vqpu
