#pragma once

#include <cstdint>

namespace dyadic {

// splitmix64: the seed fully determines the stream, on every platform.
// Doubles come from the top 53 bits, so generated corpora are bit-identical
// across compilers and standard libraries.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    // Independent substream, for splitting work deterministically.
    SplitMix64 split() { return SplitMix64(next() ^ 0x5851f42d4c957f2dULL); }
};

}  // namespace dyadic
