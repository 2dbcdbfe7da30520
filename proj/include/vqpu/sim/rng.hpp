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
#include <random>
#include <string_view>

namespace vqpu {

/// Recorded in result metadata so runs can be replayed.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64-stream";

/// SplitMix64 finalizer, used only to decorrelate stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of stream `stream` (a shot index) of job seed `seed`.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

class ShotRng {
public:
    explicit ShotRng(std::uint64_t seed) : gen_(seed) {}
    static ShotRng for_stream(std::uint64_t seed, std::uint64_t stream) {
        return ShotRng(stream_seed(seed, stream));
    }

    /// Uniform in [0, 1) with 53 random bits; identical across platforms.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    std::uint64_t next() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace vqpu
