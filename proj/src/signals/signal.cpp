#include "diner/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "diner/errors.hpp"
#include "diner/rng.hpp"

namespace diner {

GridSignal::GridSignal(GridIndexer grid, DenseMatrix attributes)
    : grid_(std::move(grid)), attributes_(std::move(attributes)) {
    if (attributes_.rows() != grid_.size()) {
        throw DimensionError("grid signal: " + std::to_string(attributes_.rows()) +
                             " attribute rows for a grid of " + std::to_string(grid_.size()));
    }
    if (attributes_.cols() == 0) {
        throw DimensionError("grid signal: needs at least one channel");
    }
    if (!all_finite(attributes_)) {
        throw NumericError("grid signal: non-finite attribute");
    }
}

std::vector<double> GridSignal::channel(std::size_t c) const {
    if (c >= channels()) {
        throw IndexError("grid signal: channel " + std::to_string(c) + " of " +
                         std::to_string(channels()));
    }
    std::vector<double> plane(size());
    for (std::size_t i = 0; i < size(); ++i) {
        plane[i] = attributes_(i, c);
    }
    return plane;
}

void GridSignal::clamp_unit() {
    for (double& v : attributes_.values()) {
        v = std::clamp(v, 0.0, 1.0);
    }
}

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
    std::vector<char> seen(map_.size(), 0);
    for (std::size_t v : map_) {
        if (v >= map_.size() || seen[v]) {
            throw ValidationError("permutation: not a bijection over [0, " +
                                  std::to_string(map_.size()) + ")");
        }
        seen[v] = 1;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::size_t> map(n);
    std::iota(map.begin(), map.end(), 0);
    return Permutation(std::move(map));
}

Permutation Permutation::random(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> map(n);
    std::iota(map.begin(), map.end(), 0);
    Rng rng = make_rng(seed, "permutation");
    // Fisher-Yates with explicit draws; std::shuffle's algorithm is unspecified.
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(map[i - 1], map[j]);
    }
    return Permutation(std::move(map));
}

Permutation Permutation::inverse() const {
    std::vector<std::size_t> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) {
        inv[map_[i]] = i;
    }
    return Permutation(std::move(inv));
}

GridSignal permute(const GridSignal& signal, const Permutation& perm) {
    if (perm.size() != signal.size()) {
        throw ValidationError("permute: permutation over " + std::to_string(perm.size()) +
                              " elements for a signal of " + std::to_string(signal.size()));
    }
    DenseMatrix out(signal.size(), signal.channels());
    for (std::size_t i = 0; i < signal.size(); ++i) {
        auto src = signal.attributes().row(perm[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return GridSignal(signal.grid(), std::move(out));
}

std::pair<GridSignal, Permutation> sort_by_intensity(const GridSignal& signal) {
    const std::size_t n = signal.size();
    std::vector<double> luminance(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (double v : signal.attributes().row(i)) {
            s += v;
        }
        luminance[i] = s / static_cast<double>(signal.channels());
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return luminance[a] < luminance[b]; });
    Permutation perm(std::move(order));
    return {permute(signal, perm), perm};
}

GridSignal make_rank_deficient(const GridSignal& base, std::size_t total_channels,
                               const DenseMatrix& mix, bool clamp) {
    const std::size_t base_channels = base.channels();
    if (mix.rows() != total_channels || mix.cols() != base_channels ||
        total_channels < base_channels) {
        throw DimensionError("make_rank_deficient: mix " + mix.shape_string() + " for " +
                             std::to_string(total_channels) + " outputs from " +
                             std::to_string(base_channels) + " base channels");
    }
    for (std::size_t j = 0; j < base_channels; ++j) {
        for (std::size_t k = 0; k < base_channels; ++k) {
            if (mix(j, k) != (j == k ? 1.0 : 0.0)) {
                throw ValidationError("make_rank_deficient: leading block of mix must be identity");
            }
        }
    }
    DenseMatrix out(base.size(), total_channels);
    for (std::size_t i = 0; i < base.size(); ++i) {
        for (std::size_t j = 0; j < total_channels; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < base_channels; ++k) {
                s += mix(j, k) * base.attributes()(i, k);
            }
            out(i, j) = clamp ? std::clamp(s, 0.0, 1.0) : s;
        }
    }
    return GridSignal(base.grid(), std::move(out));
}

std::vector<double> singular_values(const DenseMatrix& m) {
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    // Columns stored contiguously for the rotations.
    std::vector<std::vector<double>> cols(d, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            cols[j][i] = m(i, j);
        }
    }
    const double tiny = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    alpha += cols[p][i] * cols[p][i];
                    beta += cols[q][i] * cols[q][i];
                    gamma += cols[p][i] * cols[q][i];
                }
                if (gamma == 0.0 || std::abs(gamma) <= tiny * std::sqrt(alpha * beta)) {
                    continue;
                }
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const double a = cols[p][i];
                    const double b = cols[q][i];
                    cols[p][i] = c * a - s * b;
                    cols[q][i] = s * a + c * b;
                }
            }
        }
        if (!rotated) {
            break;
        }
    }
    std::vector<double> sigma(d);
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (double v : cols[j]) {
            s += v * v;
        }
        sigma[j] = std::sqrt(s);
    }
    std::sort(sigma.begin(), sigma.end(), std::greater<>());
    return sigma;
}

std::size_t attribute_rank(const GridSignal& signal, double tol) {
    if (signal.size() == 0) {
        throw ValidationError("attribute_rank: empty signal");
    }
    if (!(tol > 0)) {
        throw ValidationError("attribute_rank: tolerance must be positive");
    }
    const auto sigma = singular_values(signal.attributes());
    if (sigma.empty() || sigma.front() == 0.0) {
        return 0;
    }
    const double cutoff = tol * sigma.front();
    return static_cast<std::size_t>(
        std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > cutoff; }));
}

double psnr_from_mse(double mse, double peak) {
    if (mse == 0.0) {
        return psnr_identical;
    }
    return 10.0 * std::log10(peak * peak / mse);
}

double psnr(std::span<const double> a, std::span<const double> b, double peak) {
    if (a.size() != b.size() || a.empty()) {
        throw DimensionError("psnr: sizes " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return psnr_from_mse(sum / static_cast<double>(a.size()), peak);
}

double psnr(const GridSignal& a, const GridSignal& b) {
    if (!a.attributes().same_shape(b.attributes())) {
        throw DimensionError("psnr: shapes " + a.attributes().shape_string() + " and " +
                             b.attributes().shape_string());
    }
    return psnr(a.attributes().values(), b.attributes().values());
}

} // namespace diner
