#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace diner {

using Rng = std::mt19937_64;

/// Derives an independent seed for a named consumer ("init", "shuffle",
/// "synthetic", ...) so that every random stream flows from one config seed.
[[nodiscard]] inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char ch : name) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    std::uint64_t z = seed ^ h;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

[[nodiscard]] inline Rng make_rng(std::uint64_t seed, std::string_view name) {
    return Rng(substream_seed(seed, name));
}

} // namespace diner
