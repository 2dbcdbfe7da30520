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
    CLI::App app{"Stop vQPU families and remove them from the registry"};
    std::string family;
    bool all = false;
    app.add_option("family", family, "family to drop");
    app.add_flag("--all", all, "drop every family");
    CLI11_PARSE(app, argc, argv);
    if (family.empty() == !all) {
        std::cerr << "qdrop: give a family name or --all" << std::endl;
        return 2;
    }
    try {
        const auto r = vqpu::qdrop(all ? std::nullopt : std::optional<std::string>(family));
        for (const auto& w : r.warnings) std::cerr << "qdrop: warning: " << w << "\n";
        std::cout << r.terminated << " terminated\n";
    } catch (const vqpu::Error& e) {
        std::cerr << "qdrop: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
