#pragma once

#include <cstddef>
#include <cstdint>

#include "diner/signal.hpp"

namespace diner::synthetic {

[[nodiscard]] GridSignal constant_image(std::size_t height, std::size_t width,
                                        std::size_t channels, double value);

/// Procedural stand-in for a natural photograph: a 1/f sum of random
/// sinusoids plus a few hard-edged shapes, with per-channel variation so
/// that colour images have full attribute rank. Values lie in [0, 1].
[[nodiscard]] GridSignal natural_image(std::size_t height, std::size_t width,
                                       std::size_t channels, std::uint64_t seed);

/// total x base mixing matrix: identity on top, then rows of non-negative
/// weights summing to one (so outputs stay inside [0, 1]).
[[nodiscard]] DenseMatrix convex_mix(std::size_t total, std::size_t base, std::uint64_t seed);

/// natural_image with `base` channels expanded to `total` channels by
/// convex_mix; attribute rank equals `base`.
[[nodiscard]] GridSignal rank_deficient_image(std::size_t height, std::size_t width,
                                              std::size_t base, std::size_t total,
                                              std::uint64_t seed);

} // namespace diner::synthetic
