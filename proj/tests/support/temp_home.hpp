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

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include "vqpu/orchestrator/lifecycle.hpp"

// Private CUNQA_HOME for one test; drops every family it raised on exit.
class TempHome {
public:
    TempHome() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("vqpu-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempHome() {
        try {
            vqpu::qdrop(std::nullopt, path_);
        } catch (...) {
        }
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempHome(const TempHome&) = delete;
    TempHome& operator=(const TempHome&) = delete;

    const std::filesystem::path& path() const { return path_; }

    vqpu::QraiseOptions options(std::size_t n, std::string ttl = "00:10:00") const {
        vqpu::QraiseOptions o;
        o.n = n;
        o.ttl = std::move(ttl);
        o.home = path_;
        o.server_binary = VQPU_SERVER_BINARY;
        return o;
    }

private:
    std::filesystem::path path_;
};
