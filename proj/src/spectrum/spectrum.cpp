#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "diner/errors.hpp"
#include "diner/spectrum.hpp"

namespace diner {

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

double Spectrum2D::total_power() const {
    double s = 0.0;
    for (const auto& c : coefficients) {
        s += std::norm(c);
    }
    return s;
}

Spectrum2D dft2(std::span<const double> plane, std::size_t height, std::size_t width) {
    if (height == 0 || width == 0) {
        throw DimensionError("dft2: empty plane");
    }
    if (plane.size() != height * width) {
        throw DimensionError("dft2: " + std::to_string(plane.size()) + " values for a " +
                             std::to_string(height) + "x" + std::to_string(width) + " plane");
    }
    ComplexPlane p(height, width);
    for (std::size_t i = 0; i < plane.size(); ++i) {
        p.data[i] = plane[i];
    }
    fft2_inplace(p, false);

    Spectrum2D out;
    out.height = height;
    out.width = width;
    out.coefficients.resize(height * width);
    // Frequency 0 lands at (height/2, width/2).
    for (std::size_t y = 0; y < height; ++y) {
        const std::size_t sy = (y + height / 2) % height;
        for (std::size_t x = 0; x < width; ++x) {
            const std::size_t sx = (x + width / 2) % width;
            out.coefficients[sy * width + sx] = p(y, x);
        }
    }
    return out;
}

Spectrum2D dft2(const GridSignal& signal, std::size_t channel) {
    if (signal.grid().rank() != 2) {
        throw DimensionError("dft2: signal has rank " + std::to_string(signal.grid().rank()) +
                             ", need a 2D plane");
    }
    if (channel >= signal.channels()) {
        throw IndexError("dft2: channel " + std::to_string(channel) + " of " +
                         std::to_string(signal.channels()));
    }
    const auto values = signal.channel(channel);
    return dft2(values, signal.height(), signal.width());
}

const char* to_string(BandMeasure m) { return m == BandMeasure::magnitude ? "|F|" : "|F|^2"; }

BandMeasure parse_band_measure(const std::string& name) {
    if (name == "magnitude") {
        return BandMeasure::magnitude;
    }
    if (name == "power") {
        return BandMeasure::power;
    }
    throw ValidationError("unknown band measure '" + name + "' (expected magnitude or power)");
}

std::vector<double> band_ratios(const Spectrum2D& spectrum, std::size_t n_bands,
                                BandMeasure measure) {
    if (n_bands == 0) {
        throw ValidationError("band_ratios: need at least one band");
    }
    const double h = static_cast<double>(spectrum.height);
    const double w = static_cast<double>(spectrum.width);
    auto radius = [&](std::size_t y, std::size_t x) {
        const double fy = static_cast<double>(spectrum.freq_y(y)) / h;
        const double fx = static_cast<double>(spectrum.freq_x(x)) / w;
        return std::hypot(fy, fx);
    };
    double rmax = 0.0;
    for (std::size_t y = 0; y < spectrum.height; ++y) {
        for (std::size_t x = 0; x < spectrum.width; ++x) {
            rmax = std::max(rmax, radius(y, x));
        }
    }
    std::vector<double> energy(n_bands, 0.0);
    double total = 0.0;
    for (std::size_t y = 0; y < spectrum.height; ++y) {
        for (std::size_t x = 0; x < spectrum.width; ++x) {
            const double r = rmax > 0 ? radius(y, x) / rmax : 0.0;
            const auto band = std::min(
                static_cast<std::size_t>(std::floor(r * static_cast<double>(n_bands))), n_bands - 1);
            const double e = measure == BandMeasure::magnitude ? std::abs(spectrum.at(y, x))
                                                                : std::norm(spectrum.at(y, x));
            energy[band] += e;
            total += e;
        }
    }
    if (total == 0.0) {
        // An all-zero plane has no spectrum to distribute; report it as DC.
        energy.assign(n_bands, 0.0);
        energy[0] = 1.0;
        return energy;
    }
    for (auto& e : energy) {
        e /= total;
    }
    return energy;
}

std::vector<double> band_ratios(const GridSignal& signal, std::size_t n_bands,
                                BandMeasure measure) {
    std::vector<double> mean(n_bands, 0.0);
    for (std::size_t c = 0; c < signal.channels(); ++c) {
        const auto r = band_ratios(dft2(signal, c), n_bands, measure);
        for (std::size_t k = 0; k < n_bands; ++k) {
            mean[k] += r[k];
        }
    }
    for (auto& v : mean) {
        v /= static_cast<double>(signal.channels());
    }
    return mean;
}

void write_spectrum_csv(const Spectrum2D& spectrum, std::ostream& os) {
    os << "f_y,f_x,power\n";
    for (std::size_t y = 0; y < spectrum.height; ++y) {
        for (std::size_t x = 0; x < spectrum.width; ++x) {
            os << spectrum.freq_y(y) << ',' << spectrum.freq_x(x) << ','
               << format_double(std::norm(spectrum.at(y, x))) << '\n';
        }
    }
}

void write_band_ratios_csv(const std::vector<double>& ratios, const std::string& label,
                           BandMeasure measure, std::ostream& os, bool header) {
    if (header) {
        os << "label,measure";
        for (std::size_t k = 0; k < ratios.size(); ++k) {
            os << ",band_" << k;
        }
        os << '\n';
    }
    os << label << ',' << to_string(measure);
    for (const double r : ratios) {
        os << ',' << format_double(r);
    }
    os << '\n';
}

} // namespace diner
