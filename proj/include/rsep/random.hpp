// Copyright 2026 The rsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file random.hpp
 * Keyed pseudo-random streams. A stream is identified by the master seed, a
 * text label and integer counters (shot, site, retry...), so any partition
 * of work across threads reproduces the same draws.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace rsep {

/// 64-bit FNV-1a; used only to turn stream labels into seed words.
inline std::uint64_t label_hash(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::mt19937_64 keyed_engine(std::uint64_t seed, std::string_view label,
                                    std::initializer_list<std::uint64_t> counters) {
    std::vector<std::uint32_t> words;
    const auto push = [&words](std::uint64_t x) {
        words.push_back(static_cast<std::uint32_t>(x));
        words.push_back(static_cast<std::uint32_t>(x >> 32));
    };
    push(seed);
    push(label_hash(label));
    for (auto c : counters) {
        push(c);
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

/// Uniform double in [0, 1).
inline double uniform01(std::mt19937_64 &engine) {
    const double u = std::generate_canonical<double, 53>(engine);
    // Older libstdc++ can round up to exactly 1.
    return u < 1.0 ? u : std::nextafter(1.0, 0.0);
}

} // namespace rsep
