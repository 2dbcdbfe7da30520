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
    CLI::App app{"List registered vQPUs and probe their status"};
    std::string family;
    bool as_json = false;
    app.add_option("--family", family, "only this family");
    app.add_flag("--json", as_json, "print JSON");
    CLI11_PARSE(app, argc, argv);
    try {
        const auto rows = vqpu::qinfo(family.empty() ? std::nullopt : std::optional<std::string>(family));
        if (as_json) {
            std::cout << vqpu::qinfo_to_json(rows).dump(2) << "\n";
        } else {
            std::cout << vqpu::format_qinfo(rows);
        }
    } catch (const vqpu::Error& e) {
        std::cerr << "qinfo: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
