#pragma once

#include <cstdint>
#include <random>

namespace netmeasure {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based child seed: the stream for `index` does not depend on how many
/// siblings are drawn, so adding grid points or replications never perturbs others.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix64(mix64(parent) ^ (index * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index, Rest... rest) noexcept {
    return derive_seed(derive_seed(parent, index), static_cast<std::uint64_t>(rest)...);
}

// The helpers below avoid std::*_distribution so streams are identical across
// standard library implementations.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) {
    return uniform01(rng) < p;
}

__extension__ using uint128 = unsigned __int128;

/// Uniform integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    std::uint64_t x = rng();
    auto m = static_cast<uint128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = rng();
            m = static_cast<uint128>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

/// Standard normal draw (Box-Muller, one value per call).
double standard_normal(Rng& rng);

}  // namespace netmeasure
