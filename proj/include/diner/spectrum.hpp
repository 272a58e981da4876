#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "diner/signal.hpp"

namespace diner {

using Complex = std::complex<double>;

/// One-dimensional DFT of a fixed length. Powers of two run an iterative
/// radix-2 transform; other lengths go through Bluestein's chirp-z
/// convolution, so no padding is ever applied to the data.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);

    [[nodiscard]] std::size_t size() const { return n_; }

    /// In place. The inverse includes the 1/n factor.
    void execute(std::span<Complex> data, bool inverse) const;

private:
    void radix2(std::span<Complex> data, bool inverse) const;

    std::size_t n_ = 0;
    bool pow2_ = true;
    std::vector<std::size_t> bitrev_;
    std::vector<Complex> twiddle_; // exp(-2 pi i k / n), k < n/2
    // Bluestein state.
    std::vector<Complex> chirp_;     // exp(-pi i k^2 / n)
    std::vector<Complex> chirp_fft_; // transform of the conjugate chirp filter
    std::vector<Complex> chirp_fft_inv_;
    std::unique_ptr<FftPlan> inner_;
};

/// Row-major complex plane.
struct ComplexPlane {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<Complex> data;

    ComplexPlane() = default;
    ComplexPlane(std::size_t h, std::size_t w) : height(h), width(w), data(h * w) {}

    [[nodiscard]] Complex& operator()(std::size_t y, std::size_t x) { return data[y * width + x]; }
    [[nodiscard]] const Complex& operator()(std::size_t y, std::size_t x) const {
        return data[y * width + x];
    }
    [[nodiscard]] std::size_t size() const { return data.size(); }
};

/// Unshifted 2D transform by rows then columns; the inverse is normalized.
void fft2_inplace(ComplexPlane& plane, bool inverse = false);
[[nodiscard]] ComplexPlane fft2(ComplexPlane plane);
[[nodiscard]] ComplexPlane ifft2(ComplexPlane plane);

/// DC-centered spectrum: coefficient (y, x) holds frequency
/// (y - height/2, x - width/2) in cycles per image (integer division).
struct Spectrum2D {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<Complex> coefficients;

    [[nodiscard]] const Complex& at(std::size_t y, std::size_t x) const {
        return coefficients[y * width + x];
    }
    [[nodiscard]] long freq_y(std::size_t y) const {
        return static_cast<long>(y) - static_cast<long>(height / 2);
    }
    [[nodiscard]] long freq_x(std::size_t x) const {
        return static_cast<long>(x) - static_cast<long>(width / 2);
    }
    [[nodiscard]] double total_power() const;
};

/// `plane` is height x width, row-major. Throws DimensionError when empty.
[[nodiscard]] Spectrum2D dft2(std::span<const double> plane, std::size_t height,
                              std::size_t width);

/// Spectrum of one channel of a 2D signal.
[[nodiscard]] Spectrum2D dft2(const GridSignal& signal, std::size_t channel = 0);

/// Spectral weight per coefficient: |F| or |F|^2.
enum class BandMeasure { magnitude, power };

[[nodiscard]] const char* to_string(BandMeasure m);
[[nodiscard]] BandMeasure parse_band_measure(const std::string& name);

/// Fraction of spectral weight per equal-width radial annulus. Radius is the
/// distance to DC in normalized frequency (f_y / H, f_x / W) divided by the
/// largest such distance on the grid; band k covers [k/n, (k+1)/n) and the
/// outermost band also takes r = 1.
[[nodiscard]] std::vector<double> band_ratios(const Spectrum2D& spectrum, std::size_t n_bands = 4,
                                              BandMeasure measure = BandMeasure::magnitude);

/// Per-channel band ratios, averaged over channels.
[[nodiscard]] std::vector<double> band_ratios(const GridSignal& signal, std::size_t n_bands = 4,
                                              BandMeasure measure = BandMeasure::magnitude);

/// `f_y,f_x,power` rows, power = |F|^2.
void write_spectrum_csv(const Spectrum2D& spectrum, std::ostream& os);

/// Header `label,measure,band_0,...` and one record.
void write_band_ratios_csv(const std::vector<double>& ratios, const std::string& label,
                           BandMeasure measure, std::ostream& os, bool header = true);

} // namespace diner
