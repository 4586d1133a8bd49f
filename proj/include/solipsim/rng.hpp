// Copyright 2026 The solipsim Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string_view>

namespace solipsim {

/// SplitMix64 (Steele, Lea & Flood 2014). Each (seed, stream) pair keys an
/// independent sequence, so rounds and shots can be drawn in any order or on
/// any worker and still reproduce the same values.
class SplitMix64 {
  public:
    static constexpr std::string_view kAlgorithm = "splitmix64/stream-v1";

    explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(mix(seed ^ mix(stream + kGolden))) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Seed for the index-th independent child run.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
        return mix(mix(seed) + (index + 1) * kGolden);
    }

  private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace solipsim
