#pragma once

#include <cstdint>
#include <random>

namespace qmsd {

// All randomized entry points use std::mt19937_64, which the standard pins
// bit-for-bit across platforms.  Distribution adapters from <random> are NOT
// pinned, so every draw below works on raw 64-bit outputs only.

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic per-stream seed for (seed, stream_index).
inline uint64_t derive_stream_seed(uint64_t seed, uint64_t stream_index) {
    uint64_t s = seed;
    uint64_t first = splitmix64(s);
    s = first ^ (stream_index * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL);
    return splitmix64(s);
}

// Unbiased draw from [0, n) by rejection on the top of the 64-bit range.
inline uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace qmsd
