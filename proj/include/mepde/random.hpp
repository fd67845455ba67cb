#pragma once

#include <cmath>
#include <cstdint>

namespace mepde {

/// SplitMix64 (Steele/Lea/Flood). Counter-based: each draw advances the state
/// by a fixed odd constant and mixes it, so output k depends only on
/// (initial state, k). Fully specified here, hence byte-stable across
/// platforms, compilers and runs.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1]; never returns 0 so log() is safe.
    double uniform01() {
        return double((next() >> 11) + 1) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    /// Independent stream for (seed, index), e.g. one per Monte-Carlo
    /// trajectory. Results are independent of how work is scheduled.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
        SplitMix64 g(seed ^ (0xD2B74407B1CE6E93ull * (index + 1)));
        g.next();
        return g;
    }
};

}  // namespace mepde
