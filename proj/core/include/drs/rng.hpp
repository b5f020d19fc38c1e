#pragma once

#include <cstdint>
#include <random>

namespace drs {

/// Generator used for every random draw in the library (folds, bags).
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective, so distinct streams never share a seed.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for sub-stream `stream` of `seed`: seed XOR mix64(stream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return seed ^ mix64(stream);
}

inline constexpr std::uint64_t kDefaultSeed = 20190714;

} // namespace drs
