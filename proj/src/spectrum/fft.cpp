#include <cmath>
#include <numbers>

#include "diner/errors.hpp"
#include "diner/spectrum.hpp"

namespace diner {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

} // namespace

FftPlan::FftPlan(std::size_t n) : n_(n), pow2_(is_pow2(n)) {
    if (n == 0) {
        throw DimensionError("FftPlan: length must be positive");
    }
    if (pow2_) {
        bitrev_.resize(n);
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < n) {
            ++bits;
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b) {
                r |= ((i >> b) & 1U) << (bits - 1 - b);
            }
            bitrev_[i] = r;
        }
        twiddle_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            twiddle_[k] = {std::cos(a), std::sin(a)};
        }
        return;
    }
    // k^2 mod 2n keeps the chirp argument small and exact.
    chirp_.resize(n);
    const std::size_t two_n = 2 * n;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k2 = static_cast<std::size_t>(
            (static_cast<unsigned __int128>(k) * k) % two_n);
        const double a = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
        chirp_[k] = {std::cos(a), std::sin(a)};
    }
    const std::size_t m = next_pow2(2 * n - 1);
    inner_ = std::make_unique<FftPlan>(m);
    std::vector<Complex> filter(m);
    filter[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n; ++k) {
        filter[k] = std::conj(chirp_[k]);
        filter[m - k] = std::conj(chirp_[k]);
    }
    chirp_fft_ = filter;
    inner_->execute(chirp_fft_, false);
    // Inverse transform uses the conjugate chirp: filter becomes chirp itself.
    for (auto& v : filter) {
        v = std::conj(v);
    }
    chirp_fft_inv_ = filter;
    inner_->execute(chirp_fft_inv_, false);
}

void FftPlan::radix2(std::span<Complex> a, bool inverse) const {
    const std::size_t n = n_;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < bitrev_[i]) {
            std::swap(a[i], a[bitrev_[i]]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < half; ++j) {
                Complex w = twiddle_[j * step];
                if (inverse) {
                    w = std::conj(w);
                }
                const Complex u = a[i + j];
                const Complex v = a[i + j + half] * w;
                a[i + j] = u + v;
                a[i + j + half] = u - v;
            }
        }
    }
}

void FftPlan::execute(std::span<Complex> data, bool inverse) const {
    if (data.size() != n_) {
        throw DimensionError("FftPlan: data of length " + std::to_string(data.size()) +
                             " for a plan of length " + std::to_string(n_));
    }
    if (pow2_) {
        radix2(data, inverse);
    } else {
        const std::size_t m = inner_->size();
        std::vector<Complex> buf(m);
        for (std::size_t k = 0; k < n_; ++k) {
            const Complex c = inverse ? std::conj(chirp_[k]) : chirp_[k];
            buf[k] = data[k] * c;
        }
        inner_->execute(buf, false);
        const auto& h = inverse ? chirp_fft_inv_ : chirp_fft_;
        for (std::size_t k = 0; k < m; ++k) {
            buf[k] *= h[k];
        }
        inner_->execute(buf, true);
        for (std::size_t k = 0; k < n_; ++k) {
            const Complex c = inverse ? std::conj(chirp_[k]) : chirp_[k];
            data[k] = buf[k] * c;
        }
    }
    if (inverse) {
        const double s = 1.0 / static_cast<double>(n_);
        for (auto& v : data) {
            v *= s;
        }
    }
}

void fft2_inplace(ComplexPlane& plane, bool inverse) {
    if (plane.height == 0 || plane.width == 0) {
        throw DimensionError("fft2: empty plane");
    }
    const FftPlan rows(plane.width);
    for (std::size_t y = 0; y < plane.height; ++y) {
        rows.execute(std::span<Complex>(plane.data.data() + y * plane.width, plane.width), inverse);
    }
    const FftPlan cols(plane.height);
    std::vector<Complex> column(plane.height);
    for (std::size_t x = 0; x < plane.width; ++x) {
        for (std::size_t y = 0; y < plane.height; ++y) {
            column[y] = plane(y, x);
        }
        cols.execute(column, inverse);
        for (std::size_t y = 0; y < plane.height; ++y) {
            plane(y, x) = column[y];
        }
    }
}

ComplexPlane fft2(ComplexPlane plane) {
    fft2_inplace(plane, false);
    return plane;
}

ComplexPlane ifft2(ComplexPlane plane) {
    fft2_inplace(plane, true);
    return plane;
}

} // namespace diner
