#include "diner/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "diner/errors.hpp"
#include "diner/rng.hpp"

namespace diner::synthetic {

namespace {

std::vector<double> pink_field(std::size_t h, std::size_t w, Rng& rng, int components) {
    std::vector<double> field(h * w, 0.0);
    const double fmax = std::max(2.0, static_cast<double>(std::min(h, w)) / 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int m = 0; m < components; ++m) {
        const double f = std::exp(unit(rng) * std::log(fmax)); // log-uniform in [1, fmax]
        const double theta = 2.0 * std::numbers::pi * unit(rng);
        const double phase = 2.0 * std::numbers::pi * unit(rng);
        const double fy = f * std::sin(theta);
        const double fx = f * std::cos(theta);
        const double amp = 1.0 / f;
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const double arg = 2.0 * std::numbers::pi *
                                       (fy * static_cast<double>(y) / static_cast<double>(h) +
                                        fx * static_cast<double>(x) / static_cast<double>(w)) +
                                   phase;
                field[y * w + x] += amp * std::cos(arg);
            }
        }
    }
    return field;
}

void add_shapes(std::vector<double>& field, std::size_t h, std::size_t w, Rng& rng, int count) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < count; ++s) {
        const double cy = unit(rng) * static_cast<double>(h);
        const double cx = unit(rng) * static_cast<double>(w);
        const double r = (0.08 + 0.2 * unit(rng)) * static_cast<double>(std::min(h, w));
        const double level = unit(rng) < 0.5 ? -0.8 : 0.8;
        const bool disk = unit(rng) < 0.5;
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const double dy = static_cast<double>(y) - cy;
                const double dx = static_cast<double>(x) - cx;
                const bool inside =
                    disk ? dy * dy + dx * dx < r * r : std::abs(dy) < r && std::abs(dx) < 0.6 * r;
                if (inside) {
                    field[y * w + x] += level;
                }
            }
        }
    }
}

void normalize(std::vector<double>& v, double lo, double hi) {
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double a = *mn;
    const double span = *mx - *mn;
    for (double& x : v) {
        x = span > 0 ? lo + (hi - lo) * (x - a) / span : 0.5 * (lo + hi);
    }
}

} // namespace

GridSignal constant_image(std::size_t height, std::size_t width, std::size_t channels,
                          double value) {
    return GridSignal(GridIndexer({height, width}), DenseMatrix(height * width, channels, value));
}

GridSignal natural_image(std::size_t height, std::size_t width, std::size_t channels,
                         std::uint64_t seed) {
    if (channels == 0) {
        throw ValidationError("natural_image: needs at least one channel");
    }
    Rng rng = make_rng(seed, "synthetic");
    auto base = pink_field(height, width, rng, 40);
    add_shapes(base, height, width, rng, 5);
    normalize(base, 0.0, 1.0);

    DenseMatrix attrs(height * width, channels);
    for (std::size_t c = 0; c < channels; ++c) {
        auto tint = pink_field(height, width, rng, 12);
        normalize(tint, 0.0, 1.0);
        std::vector<double> ch(height * width);
        for (std::size_t i = 0; i < ch.size(); ++i) {
            ch[i] = channels == 1 ? base[i] : 0.65 * base[i] + 0.35 * tint[i];
        }
        normalize(ch, 0.02, 0.98);
        for (std::size_t i = 0; i < ch.size(); ++i) {
            attrs(i, c) = ch[i];
        }
    }
    return GridSignal(GridIndexer({height, width}), std::move(attrs));
}

DenseMatrix convex_mix(std::size_t total, std::size_t base, std::uint64_t seed) {
    if (total < base || base == 0) {
        throw ValidationError("convex_mix: need total >= base >= 1");
    }
    DenseMatrix mix(total, base);
    for (std::size_t j = 0; j < base; ++j) {
        mix(j, j) = 1.0;
    }
    Rng rng = make_rng(seed, "mix");
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    for (std::size_t j = base; j < total; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < base; ++k) {
            mix(j, k) = unit(rng);
            s += mix(j, k);
        }
        for (std::size_t k = 0; k < base; ++k) {
            mix(j, k) /= s;
        }
    }
    return mix;
}

GridSignal rank_deficient_image(std::size_t height, std::size_t width, std::size_t base,
                                std::size_t total, std::uint64_t seed) {
    const auto b = natural_image(height, width, base, seed);
    return make_rank_deficient(b, total, convex_mix(total, base, seed));
}

} // namespace diner::synthetic
