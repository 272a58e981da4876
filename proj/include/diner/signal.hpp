#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "diner/grid.hpp"
#include "diner/matrix.hpp"

namespace diner {

/// A discrete d_in-dimensional grid carrying a d_out-dimensional attribute
/// per element. Row i of `attributes` belongs to flattened index i.
class GridSignal {
public:
    GridSignal() = default;
    GridSignal(GridIndexer grid, DenseMatrix attributes);

    [[nodiscard]] const GridIndexer& grid() const { return grid_; }
    [[nodiscard]] const DenseMatrix& attributes() const { return attributes_; }
    [[nodiscard]] DenseMatrix& attributes() { return attributes_; }
    [[nodiscard]] std::size_t size() const { return attributes_.rows(); }
    [[nodiscard]] std::size_t channels() const { return attributes_.cols(); }

    /// Height and width for d_in = 2 signals.
    [[nodiscard]] std::size_t height() const { return grid_.dims().at(0); }
    [[nodiscard]] std::size_t width() const { return grid_.dims().at(1); }

    /// One channel as a plane in flattened order.
    [[nodiscard]] std::vector<double> channel(std::size_t c) const;

    void clamp_unit();

    friend bool operator==(const GridSignal&, const GridSignal&) = default;

private:
    GridIndexer grid_;
    DenseMatrix attributes_;
};

/// A bijection over [0, N). Applying it gathers: out[i] = in[map[i]].
class Permutation {
public:
    Permutation() = default;
    /// Throws ValidationError unless `map` is a bijection.
    explicit Permutation(std::vector<std::size_t> map);

    static Permutation identity(std::size_t n);
    static Permutation random(std::size_t n, std::uint64_t seed);

    [[nodiscard]] std::size_t size() const { return map_.size(); }
    [[nodiscard]] std::size_t operator[](std::size_t i) const { return map_[i]; }
    [[nodiscard]] const std::vector<std::size_t>& map() const { return map_; }
    [[nodiscard]] Permutation inverse() const;

private:
    std::vector<std::size_t> map_;
};

[[nodiscard]] GridSignal permute(const GridSignal& signal, const Permutation& perm);

/// Stable ascending sort of elements by unweighted channel mean, laid back
/// onto the grid in row-major order. Returns the sorted signal and the
/// permutation that produced it.
[[nodiscard]] std::pair<GridSignal, Permutation> sort_by_intensity(const GridSignal& signal);

/// Output channel j = sum_k mix(j, k) * base channel k. The first
/// base.channels() rows of `mix` must be the identity.
[[nodiscard]] GridSignal make_rank_deficient(const GridSignal& base, std::size_t total_channels,
                                             const DenseMatrix& mix, bool clamp = false);

/// Singular values of a tall matrix (one-sided Jacobi), descending.
[[nodiscard]] std::vector<double> singular_values(const DenseMatrix& m);

/// Count of singular values of the N x d_out attribute matrix above
/// tol * sigma_max.
[[nodiscard]] std::size_t attribute_rank(const GridSignal& signal, double tol = 1e-6);

inline constexpr double psnr_identical = std::numeric_limits<double>::infinity();

/// 10 log10(peak^2 / MSE); +inf when the inputs are identical.
[[nodiscard]] double psnr(std::span<const double> a, std::span<const double> b, double peak = 1.0);
[[nodiscard]] double psnr(const GridSignal& a, const GridSignal& b);
[[nodiscard]] double psnr_from_mse(double mse, double peak = 1.0);

} // namespace diner
