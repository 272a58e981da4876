#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "diner/errors.hpp"
#include "diner/spectrum.hpp"
#include "diner/synthetic.hpp"

using namespace diner;

namespace {

std::vector<double> random_plane(std::size_t h, std::size_t w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(h * w);
    for (auto& x : v) {
        x = d(rng);
    }
    return v;
}

double sum_sq(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) {
        s += x * x;
    }
    return s;
}

GridSignal plane_signal(const std::vector<double>& v, std::size_t h, std::size_t w) {
    DenseMatrix a(h * w, 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        a(i, 0) = v[i];
    }
    return GridSignal(GridIndexer({h, w}), a);
}

} // namespace

TEST_CASE("1D plans invert for power-of-two and Bluestein lengths") {
    for (const std::size_t n : {1, 2, 8, 64, 3, 5, 17, 23, 100}) {
        const FftPlan plan(n);
        std::mt19937_64 rng(n);
        std::normal_distribution<double> d;
        std::vector<Complex> x(n), y;
        for (auto& v : x) {
            v = {d(rng), d(rng)};
        }
        y = x;
        plan.execute(y, false);
        plan.execute(y, true);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(y[i] - x[i]) <= 1e-12);
        }
    }
}

TEST_CASE("1D plan matches the defining sum") {
    for (const std::size_t n : {16, 15}) {
        const FftPlan plan(n);
        std::vector<Complex> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = {std::sin(0.3 * static_cast<double>(i)), 0.1 * static_cast<double>(i)};
        }
        auto y = x;
        plan.execute(y, false);
        for (std::size_t k = 0; k < n; ++k) {
            Complex acc{};
            for (std::size_t j = 0; j < n; ++j) {
                acc += x[j] * std::polar(1.0, -2.0 * std::numbers::pi *
                                                  static_cast<double>(j * k % n) /
                                                  static_cast<double>(n));
            }
            CHECK(std::abs(y[k] - acc) <= 1e-11);
        }
    }
}

TEST_CASE("plan rejects a mismatched buffer") {
    const FftPlan plan(8);
    std::vector<Complex> x(7);
    CHECK_THROWS_AS(plan.execute(x, false), DimensionError);
    CHECK_THROWS_AS(FftPlan(0), DimensionError);
}

TEST_CASE("dft2 matches the naive DFT on 17x23") {
    const std::size_t h = 17, w = 23;
    const auto plane = random_plane(h, w, 3);
    const auto spec = dft2(plane, h, w);
    const auto ref = oracle::naive_dft2(plane, h, w);
    double max_ref = 0, max_err = 0;
    for (std::size_t u = 0; u < h; ++u) {
        for (std::size_t v = 0; v < w; ++v) {
            const auto& got = spec.at((u + h / 2) % h, (v + w / 2) % w);
            max_ref = std::max(max_ref, std::abs(ref[u * w + v]));
            max_err = std::max(max_err, std::abs(got - ref[u * w + v]));
        }
    }
    CHECK(max_err / max_ref <= 1e-9);
}

TEST_CASE("dft2 matches the naive DFT on a power-of-two plane") {
    const auto plane = random_plane(8, 16, 4);
    const auto spec = dft2(plane, 8, 16);
    const auto ref = oracle::naive_dft2(plane, 8, 16);
    for (std::size_t u = 0; u < 8; ++u) {
        for (std::size_t v = 0; v < 16; ++v) {
            CHECK(std::abs(spec.at((u + 4) % 8, (v + 8) % 16) - ref[u * 16 + v]) <= 1e-10);
        }
    }
}

TEST_CASE("Parseval holds within 1e-10") {
    for (const auto& [h, w] : {std::pair<std::size_t, std::size_t>{32, 32}, {17, 23}, {64, 48}}) {
        const auto plane = random_plane(h, w, h * w);
        const auto spec = dft2(plane, h, w);
        const double lhs = spec.total_power();
        const double rhs = static_cast<double>(h * w) * sum_sq(plane);
        CHECK(std::abs(lhs - rhs) / rhs <= 1e-10);
    }
}

TEST_CASE("fft2 round trip") {
    ComplexPlane p(6, 10);
    for (std::size_t i = 0; i < p.size(); ++i) {
        p.data[i] = {std::cos(static_cast<double>(i)), std::sin(0.5 * static_cast<double>(i))};
    }
    const auto back = ifft2(fft2(p));
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(std::abs(back.data[i] - p.data[i]) <= 1e-12);
    }
    CHECK_THROWS_AS((void)fft2(ComplexPlane(0, 3)), DimensionError);
}

TEST_CASE("constant image puts all energy at DC") {
    const std::vector<double> plane(15 * 16, 0.5);
    const auto spec = dft2(plane, 15, 16);
    CHECK(std::abs(spec.at(7, 8) - Complex(0.5 * 240, 0)) <= 1e-12);
    CHECK(spec.freq_y(7) == 0);
    CHECK(spec.freq_x(8) == 0);
    CHECK(std::abs(spec.total_power() - std::norm(spec.at(7, 8))) <= 1e-9);
    const auto r = band_ratios(spec);
    CHECK(r[0] >= 1.0 - 1e-12);
    for (std::size_t k = 1; k < 4; ++k) {
        CHECK(r[k] <= 1e-12);
    }
    const std::vector<double> square(16 * 16, 0.25);
    CHECK(band_ratios(dft2(square, 16, 16)) == std::vector<double>{1, 0, 0, 0});
}

TEST_CASE("single-cycle horizontal cosine peaks at f_x = +-1") {
    const std::size_t h = 8, w = 12;
    std::vector<double> plane(h * w);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            plane[y * w + x] = std::cos(2 * std::numbers::pi * static_cast<double>(x) / w);
        }
    }
    const auto spec = dft2(plane, h, w);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const bool peak = spec.freq_y(y) == 0 && std::abs(spec.freq_x(x)) == 1;
            CAPTURE(y);
            CAPTURE(x);
            if (peak) {
                CHECK(std::abs(spec.at(y, x) - Complex(h * w / 2.0, 0)) <= 1e-10);
            } else {
                CHECK(std::abs(spec.at(y, x)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("dft2 rejects empty planes and non-planar signals") {
    CHECK_THROWS_AS((void)dft2(std::vector<double>{}, 0, 4), DimensionError);
    const GridSignal cube(GridIndexer({2, 2, 2}), DenseMatrix(8, 1));
    CHECK_THROWS_AS((void)dft2(cube), DimensionError);
}

TEST_CASE("band ratios sum to one") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto plane = random_plane(16 + seed, 20, seed);
        for (const std::size_t n : {1, 4, 7}) {
            const auto measure = seed % 2 == 0 ? BandMeasure::magnitude : BandMeasure::power;
            const auto r = band_ratios(dft2(plane, 16 + seed, 20), n, measure);
            REQUIRE(r.size() == n);
            double s = 0;
            for (double v : r) {
                CHECK(v >= 0.0);
                s += v;
            }
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
    }
    CHECK_THROWS_AS((void)band_ratios(dft2(random_plane(4, 4, 0), 4, 4), 0), ValidationError);
}

TEST_CASE("magnitude ratios weigh |F| and power ratios weigh |F|^2") {
    // DC of 4 and a single x-Nyquist term of 4 on a 2x2 plane: (1, 0, 1, 0).
    const std::vector<double> plane{2, 0, 2, 0};
    const auto spec = dft2(plane, 2, 2);
    const auto mag = band_ratios(spec, 2, BandMeasure::magnitude);
    const auto pow = band_ratios(spec, 2, BandMeasure::power);
    CHECK(mag[0] == doctest::Approx(0.5));
    CHECK(pow[0] == doctest::Approx(0.5));
    const std::vector<double> uneven{3, 1, 3, 1};
    const auto s2 = dft2(uneven, 2, 2);
    // |F| at DC is 8 and at the x-Nyquist bin 4.
    CHECK(band_ratios(s2, 2, BandMeasure::magnitude)[0] == doctest::Approx(8.0 / 12.0));
    CHECK(band_ratios(s2, 2, BandMeasure::power)[0] == doctest::Approx(64.0 / 80.0));
    CHECK(parse_band_measure("power") == BandMeasure::power);
    CHECK_THROWS_AS((void)parse_band_measure("log"), ValidationError);
}

TEST_CASE("Nyquist checkerboard lands in the top band") {
    // Zero-mean +-1 pattern: its whole spectrum is the single (H/2, W/2) term.
    const std::size_t n = 16;
    std::vector<double> plane(n * n);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            plane[y * n + x] = (x + y) % 2 == 0 ? 1.0 : -1.0;
        }
    }
    for (const auto m : {BandMeasure::magnitude, BandMeasure::power}) {
        CHECK(band_ratios(dft2(plane, n, n), 4, m)[3] > 0.9);
    }
}

TEST_CASE("band ratios are invariant to transposition") {
    const std::size_t h = 12, w = 20;
    const auto plane = random_plane(h, w, 7);
    std::vector<double> t(h * w);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            t[x * h + y] = plane[y * w + x];
        }
    }
    for (const auto m : {BandMeasure::magnitude, BandMeasure::power}) {
        const auto a = band_ratios(dft2(plane, h, w), 4, m);
        const auto b = band_ratios(dft2(t, w, h), 4, m);
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(std::abs(a[k] - b[k]) <= 1e-12);
        }
    }
}

TEST_CASE("smooth images concentrate energy in the low band") {
    const auto img = synthetic::natural_image(32, 32, 3, 5);
    const auto r = band_ratios(img);
    CHECK(r[0] > r[3]);
    const auto noise = band_ratios(plane_signal(random_plane(32, 32, 1), 32, 32));
    CHECK(r[0] > noise[0]);
}

TEST_CASE("multi-channel ratios average the channels") {
    const auto img = synthetic::natural_image(8, 8, 3, 2);
    const auto joint = band_ratios(img);
    std::vector<double> mean(4, 0.0);
    for (std::size_t c = 0; c < 3; ++c) {
        const auto r = band_ratios(dft2(img, c));
        for (std::size_t k = 0; k < 4; ++k) {
            mean[k] += r[k] / 3.0;
        }
    }
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(std::abs(joint[k] - mean[k]) <= 1e-15);
    }
}

TEST_CASE("spectrum and band CSVs") {
    const std::vector<double> plane(4, 1.0);
    const auto spec = dft2(plane, 2, 2);
    std::ostringstream os;
    write_spectrum_csv(spec, os);
    CHECK(os.str() == "f_y,f_x,power\n-1,-1,0\n-1,0,0\n0,-1,0\n0,0,16\n");
    std::ostringstream band;
    write_band_ratios_csv({0.75, 0.25}, "img", BandMeasure::power, band);
    write_band_ratios_csv({0.5, 0.5}, "inr", BandMeasure::magnitude, band, false);
    CHECK(band.str() == "label,measure,band_0,band_1\nimg,|F|^2,0.75,0.25\ninr,|F|,0.5,0.5\n");
}
