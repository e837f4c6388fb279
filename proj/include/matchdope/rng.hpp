// Copyright 2026 The matchdope Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace matchdope {

/// Finalizer of SplitMix64. Bijective on 64-bit words.
constexpr uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Identifiers of the disjoint random substreams used by one trajectory.
enum class StreamId : uint64_t {
    GateChoice = 1,
    GateIdentity = 2,
    MeasureSites = 3,
    MeasureOutcomes = 4,
    Initial = 5,
    Auxiliary = 6,
};

/// Seed of trajectory `index` within an ensemble drawn from `master_seed`.
constexpr uint64_t trajectory_seed(uint64_t master_seed, uint64_t index) {
    return mix64(mix64(master_seed) ^ (index * kGoldenGamma + 0x632BE59BD9B4E019ULL));
}

/// Counter-based generator: the k-th output is a pure function of (key, k).
///
/// Every draw helper below is defined here rather than through <random>
/// distributions so that sampled values are identical across standard
/// library implementations.
class RandomStream {
   public:
    using result_type = uint64_t;

    RandomStream() = default;
    explicit RandomStream(uint64_t seed, uint64_t stream = 0)
        : key_(mix64(seed ^ mix64(stream * kGoldenGamma + 0xD1B54A32D192ED03ULL))) {}
    RandomStream(uint64_t seed, StreamId stream) : RandomStream(seed, static_cast<uint64_t>(stream)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<uint64_t>::max(); }

    result_type operator()() { return mix64(key_ + (++counter_) * kGoldenGamma); }

    /// Uniform integer in [0, bound). Lemire's nearly-divisionless rejection.
    uint64_t below(uint64_t bound) {
        if (bound <= 1) {
            return 0;
        }
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<uint64_t>(m);
        if (low < bound) {
            uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Standard normal deviate (Box-Muller, one value per call).
    double normal() {
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }
    bool coin() { return ((*this)() >> 63) != 0; }

    uint64_t counter() const { return counter_; }

   private:
    uint64_t key_ = 0;
    uint64_t counter_ = 0;
};

/// Incremental FNV-1a digest used for measurement records and manifests.
class Fnv1a {
   public:
    void add(uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            state_ ^= (v >> (8 * i)) & 0xFF;
            state_ *= 0x100000001B3ULL;
        }
    }
    void add_bytes(const char* data, size_t size) {
        for (size_t i = 0; i < size; ++i) {
            state_ ^= static_cast<unsigned char>(data[i]);
            state_ *= 0x100000001B3ULL;
        }
    }
    uint64_t value() const { return state_; }

   private:
    uint64_t state_ = 0xCBF29CE484222325ULL;
};

}  // namespace matchdope
