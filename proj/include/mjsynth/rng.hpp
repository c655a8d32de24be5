#pragma once

#include <cstdint>
#include <random>

namespace mjsynth {

using Engine = std::mt19937_64;

// SplitMix64 finalizer; whitens seeds when deriving independent streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed plus a sequence of stream tags,
/// so that per-task generators never share state.
template <typename... Tags>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Tags... tags) {
    ((seed = splitmix64(seed ^ static_cast<std::uint64_t>(tags))), ...);
    return splitmix64(seed);
}

} // namespace mjsynth
