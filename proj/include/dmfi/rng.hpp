// Copyright 2026 The DMFI Authors
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
#include <vector>

namespace dmfi {

/// Deterministic source of randomness built on the fully specified
/// mt19937_64 engine. std::shuffle and the distribution classes are
/// implementation-defined, so every derivation (bounded ints, doubles,
/// shuffles) is done here to keep seeded outputs byte-stable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n). n must be > 0. Rejection sampling, no
    /// modulo bias.
    std::uint64_t bounded(std::uint64_t n);

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return double(engine_() >> 11) * (1.0 / 9007199254740992.0); }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Fisher-Yates shuffle with bounded() draws.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = std::size_t(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Index drawn proportionally to non-negative weights (not all zero).
    std::size_t weighted(const std::vector<double>& weights);

private:
    std::mt19937_64 engine_;
};

}  // namespace dmfi
