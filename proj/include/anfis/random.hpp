#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace anfis {

/// All randomness in the library flows through this engine, seeded explicitly.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1). Hand-rolled from the raw engine output so the
/// stream is identical across standard-library implementations.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Standard normal deviate via Box-Muller. Consumes exactly two engine draws
/// per call (no cached second value), keeping replay counts predictable.
inline double gaussian(Rng& rng) {
    // u1 in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01(rng);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

/// Uniform integer in [0, n). Modulo reduction; fine for shuffles.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
}

/// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
    }
    return idx;
}

} // namespace anfis
