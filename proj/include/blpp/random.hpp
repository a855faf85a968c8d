#pragma once

#include <cmath>
#include <cstdint>

namespace blpp {

// Counter-based Gaussian stream. Every increment of the environment is a pure
// function of (seed, line, cell), so regenerating with a larger window or line
// range reproduces previously seen increments bit-exactly, and generation can
// be parallelized by line with no ordering dependence.
//
// The word function is a chain of SplitMix64 finalizers, one per key
// component; the pair of 64-bit words feeding Box-Muller comes from two
// different output slots of the same keyed stream. This generator is fixed
// for the 0.1 release; the environment dump format records it implicitly
// through the format version.

inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t counter_word(uint64_t seed, int64_t line, int64_t cell, uint64_t slot) {
    uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
    h = mix64(h ^ static_cast<uint64_t>(line));
    h = mix64(h ^ static_cast<uint64_t>(cell));
    return mix64(h ^ (slot * 0x452821e638d01377ULL));
}

// Uniform in (0,1]; the +1 keeps log() finite in Box-Muller.
inline double to_unit_interval(uint64_t word) {
    return static_cast<double>((word >> 11) + 1) * 0x1.0p-53;
}

// Standard normal draw for the increment over `cell` of curve `line`.
inline double gaussian_increment(uint64_t seed, int64_t line, int64_t cell) {
    const double u1 = to_unit_interval(counter_word(seed, line, cell, 0));
    const double u2 = to_unit_interval(counter_word(seed, line, cell, 1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Replicate seeds for Monte Carlo runs: independent streams derived from a
// master seed by the same mixing chain.
inline uint64_t derive_seed(uint64_t master_seed, uint64_t replicate) {
    return mix64(mix64(master_seed ^ 0x9216d5d98979fb1bULL) ^ replicate);
}

} // namespace blpp
