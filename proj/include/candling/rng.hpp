// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_RNG_HPP
#define CANDLING_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace candling {

/**
 * @brief Deterministic pseudo-random generator (splitmix64).
 *
 * The standard <random> distributions are implementation-defined, which
 * breaks byte-identical artifacts across toolchains. Every stochastic
 * decision in the library draws from this generator through the fully
 * specified helpers below instead.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi); returns lo when the range is collapsed.
    double uniform(double lo, double hi) {
        if (hi <= lo) return lo;
        return lo + (hi - lo) * next_double();
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        // Fixed-point multiply maps the 64-bit draw onto [0, span). The bias
        // is bounded by span / 2^64, far below anything observable here.
        const unsigned __int128 prod =
            static_cast<unsigned __int128>(next_u64()) * span;
        return lo + static_cast<std::int64_t>(prod >> 64);
    }

    bool bernoulli(double p) { return next_double() < p; }

    /// Standard normal via Box-Muller (uses two draws, discards the pair).
    double normal() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(
                uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Mixes one 64-bit value into a seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (value + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a role tag,
/// e.g. derive_seed(cfg.seed, "augment"). Same inputs, same seed, always.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a over the tag bytes.
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return mix_seed(base, h);
}

/// Derives a per-index stream seed (fold index, image index, epoch).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t index) {
    return mix_seed(derive_seed(base, tag), index);
}

}  // namespace candling

#endif  // CANDLING_RNG_HPP
