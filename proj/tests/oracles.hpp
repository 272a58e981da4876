#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the implementation paths it is used to check.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "diner/matrix.hpp"

namespace oracle {

using diner::DenseMatrix;

inline DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                 double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    DenseMatrix m(rows, cols);
    for (double& v : m.values()) {
        v = dist(rng);
    }
    return m;
}

/// Triple loop, k innermost, summing from +0 then adding the bias.
inline DenseMatrix matmul_bias(const DenseMatrix& w, const DenseMatrix& b, const DenseMatrix& x) {
    DenseMatrix out(w.rows(), x.cols());
    for (std::size_t r = 0; r < w.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < w.cols(); ++k) {
                s += w(r, k) * x(k, c);
            }
            out(r, c) = s + b(r, 0);
        }
    }
    return out;
}

/// Central difference of `f` with respect to `*slot`.
inline double central_difference(const std::function<double()>& f, double* slot, double h) {
    const double saved = *slot;
    *slot = saved + h;
    const double up = f();
    *slot = saved - h;
    const double down = f();
    *slot = saved;
    return (up - down) / (2.0 * h);
}

/// Relative agreement with a small absolute floor for entries near zero.
inline bool gradients_agree(double analytic, double numeric, double rel, double abs_floor = 1e-8) {
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    return std::abs(analytic - numeric) <= rel * scale + abs_floor;
}

/// O(N^2) 2D DFT, unnormalized forward transform, unshifted.
inline std::vector<std::complex<double>> naive_dft2(const std::vector<double>& plane,
                                                    std::size_t height, std::size_t width) {
    const double two_pi = 2.0 * std::acos(-1.0);
    std::vector<std::complex<double>> out(height * width);
    for (std::size_t u = 0; u < height; ++u) {
        for (std::size_t v = 0; v < width; ++v) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t y = 0; y < height; ++y) {
                for (std::size_t x = 0; x < width; ++x) {
                    const double phase =
                        -two_pi * (static_cast<double>(u * y % height) / static_cast<double>(height) +
                                   static_cast<double>(v * x % width) / static_cast<double>(width));
                    acc += plane[y * width + x] * std::polar(1.0, phase);
                }
            }
            out[u * width + v] = acc;
        }
    }
    return out;
}

} // namespace oracle
