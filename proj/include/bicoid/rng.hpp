#pragma once

#include <cstdint>
#include <random>

namespace bicoid {

// std::mt19937_64 output is fully pinned by the standard, so a seed yields the
// same stream on every platform. All engines draw through uniform_open below;
// never through std::uniform_real_distribution, whose mapping is
// implementation-defined.
using Rng = std::mt19937_64;

/// splitmix64 finalizer; good avalanche, cheap enough to call per derivation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed for member `index` of an ensemble with the given base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return mix64(base ^ mix64(index + 0x9e3779b97f4a7c15ull));
}

/// Uniform draw on the open interval (0,1): the top 53 bits of one generator
/// word mapped to (k + 0.5) * 2^-53. Never returns 0 or 1 exactly.
inline double uniform_open(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace bicoid
