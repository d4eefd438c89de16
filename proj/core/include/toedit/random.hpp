#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace toedit {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a over raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-unit streams: a unit's draws depend only on (seed, unit key), never on
// scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept {
    return splitmix64(seed ^ splitmix64(fnv1a64(key)));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::string_view key) { return Rng{derive_seed(seed, key)}; }
inline Rng make_rng(std::uint64_t seed, std::uint64_t index) { return Rng{derive_seed(seed, index)}; }

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Unbiased index in [0, n); n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) noexcept {
    const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

/// Standard Gumbel draw; u is kept strictly inside (0, 1).
inline double gumbel(Rng& rng) noexcept {
    double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    return -std::log(-std::log(u));
}

}  // namespace toedit
