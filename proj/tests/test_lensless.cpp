#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"

#include "diner/errors.hpp"
#include "diner/lensless.hpp"

using namespace diner;

namespace {

constexpr double pitch = 2e-6;
constexpr double lambda = 532e-9;

ComplexField random_field(std::size_t h, std::size_t w, std::uint64_t seed) {
    ComplexField f(h, w, pitch, lambda);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    for (auto& v : f.plane.data) {
        v = {d(rng), d(rng)};
    }
    return f;
}

Complex inner(const ComplexPlane& a, const ComplexPlane& b) {
    Complex s{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a.data[i] * std::conj(b.data[i]);
    }
    return s;
}

double energy(const ComplexPlane& a) { return std::real(inner(a, a)); }

MeasurementSet template_set(const ComplexField& illumination, std::vector<double> z) {
    MeasurementSet set;
    set.distances = std::move(z);
    set.illumination = illumination;
    set.intensities.assign(set.distances.size(), std::vector<double>(illumination.size(), 0.0));
    return set;
}

double measurement_loss(const ComplexField& object, const MeasurementSet& set) {
    const auto pred = forward_measure(object, set);
    double s = 0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        for (std::size_t i = 0; i < pred[k].size(); ++i) {
            const double r = pred[k][i] - set.intensities[k][i];
            s += r * r;
        }
    }
    return s;
}

} // namespace

TEST_CASE("transfer function is a unit-modulus phase with H(z) H(-z) = 1") {
    const auto h0 = transfer_function(8, 12, pitch, lambda, 0.0);
    for (const auto& v : h0.data) {
        CHECK(v == Complex(1.0, 0.0));
    }
    const auto hp = transfer_function(8, 12, pitch, lambda, 1e-3);
    const auto hm = transfer_function(8, 12, pitch, lambda, -1e-3);
    for (std::size_t i = 0; i < hp.size(); ++i) {
        CHECK(std::abs(std::abs(hp.data[i]) - 1.0) <= 1e-14);
        CHECK(std::abs(hp.data[i] * hm.data[i] - Complex(1.0, 0.0)) <= 1e-12);
    }
}

TEST_CASE("evanescent components are zeroed") {
    // Pitch below the wavelength puts the corners of the band outside the disk.
    const auto h = transfer_function(16, 16, 0.3e-6, 0.5e-6, 1e-6);
    CHECK(std::abs(h(8, 8)) == 0.0);
    CHECK(std::abs(std::abs(h(0, 1)) - 1.0) <= 1e-14);
    CHECK_THROWS_AS((void)transfer_function(4, 4, 0.0, lambda, 1.0), ValidationError);
}

TEST_CASE("propagate and its adjoint satisfy <Au, v> = <u, A^H v>") {
    for (const double z : {0.5e-3, -1.2e-3, 2e-3}) {
        const auto u = random_field(24, 20, 1);
        const auto v = random_field(24, 20, 2);
        const Complex lhs = inner(propagate(u, z).plane, v.plane);
        const Complex rhs = inner(u.plane, propagate_adjoint(v, z).plane);
        CHECK(std::abs(lhs - rhs) / std::abs(lhs) <= 1e-10);
    }
}

TEST_CASE("propagation conserves energy and inverts with -z") {
    const auto u = random_field(16, 16, 3);
    const auto fwd = propagate(u, 1.5e-3);
    CHECK(std::abs(energy(fwd.plane) - energy(u.plane)) / energy(u.plane) <= 1e-10);
    const auto back = propagate(fwd, -1.5e-3);
    double err = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        err = std::max(err, std::abs(back.plane.data[i] - u.plane.data[i]));
    }
    CHECK(err <= 1e-8);
}

TEST_CASE("normal plane wave only gains the phase exp(i 2 pi z / lambda)") {
    ComplexField u(8, 8, pitch, lambda);
    std::fill(u.plane.data.begin(), u.plane.data.end(), Complex(1, 0));
    const double z = 0.37e-3;
    const auto out = propagate(u, z);
    const Complex expected = std::polar(1.0, 2 * std::numbers::pi * z / lambda);
    for (const auto& v : out.plane.data) {
        CHECK(std::abs(v - expected) <= 1e-9);
    }
}

TEST_CASE("a point-like aperture spreads as it propagates") {
    ComplexField u(64, 64, pitch, lambda);
    for (std::size_t y = 0; y < 64; ++y) {
        for (std::size_t x = 0; x < 64; ++x) {
            const double dy = static_cast<double>(y) - 32, dx = static_cast<double>(x) - 32;
            u.plane(y, x) = std::exp(-(dy * dy + dx * dx) / (2 * 1.5 * 1.5));
        }
    }
    double previous = std::norm(u.plane(32, 32));
    for (const double z : {5e-6, 10e-6, 20e-6, 40e-6, 60e-6, 80e-6}) {
        for (const double sign : {1.0, -1.0}) {
            const double c = std::norm(propagate(u, sign * z).plane(32, 32));
            CAPTURE(z);
            CHECK(c < previous);
        }
        previous = std::norm(propagate(u, z).plane(32, 32));
    }
}

TEST_CASE("unit object under unit illumination measures uniform intensity") {
    ComplexField o(8, 8, pitch, lambda);
    std::fill(o.plane.data.begin(), o.plane.data.end(), Complex(1, 0));
    const auto set = template_set(synthetic::plane_wave(o), {0.5e-3, 2e-3});
    for (const auto& plane : forward_measure(o, set)) {
        for (const double v : plane) {
            CHECK(std::abs(v - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("z = 0 measures |P O|^2") {
    const auto o = random_field(6, 5, 4);
    const auto p = random_field(6, 5, 5);
    const auto set = template_set(p, {0.0});
    const auto out = forward_measure(o, set);
    for (std::size_t i = 0; i < o.size(); ++i) {
        CHECK(std::abs(out[0][i] - std::norm(p.plane.data[i] * o.plane.data[i])) <= 1e-12);
    }
}

TEST_CASE("forward_measure matches a spatial circular convolution") {
    const std::size_t n = 16;
    const double z = 0.8e-3;
    const auto o = random_field(n, n, 6);
    const auto p = random_field(n, n, 7);
    const auto set = template_set(p, {z});

    // Point-spread function from the inverse DFT of the transfer function.
    const auto h = transfer_function(n, n, pitch, lambda, z);
    std::vector<Complex> psf(n * n);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            Complex acc{};
            for (std::size_t u = 0; u < n; ++u) {
                for (std::size_t v = 0; v < n; ++v) {
                    const double ph = 2 * std::numbers::pi *
                                      static_cast<double>((u * y + v * x) % n) / static_cast<double>(n);
                    acc += h(u, v) * std::polar(1.0, ph);
                }
            }
            psf[y * n + x] = acc / static_cast<double>(n * n);
        }
    }
    const auto out = forward_measure(o, set);
    double max_ref = 0, max_err = 0;
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            Complex acc{};
            for (std::size_t a = 0; a < n; ++a) {
                for (std::size_t b = 0; b < n; ++b) {
                    acc += psf[((y + n - a) % n) * n + (x + n - b) % n] * p.plane(a, b) * o.plane(a, b);
                }
            }
            const double ref = std::norm(acc);
            max_ref = std::max(max_ref, ref);
            max_err = std::max(max_err, std::abs(out[0][y * n + x] - ref));
        }
    }
    CHECK(max_err / max_ref <= 1e-6);
}

TEST_CASE("shape mismatches raise DimensionError") {
    const auto o = random_field(4, 4, 1);
    const auto set = template_set(random_field(4, 5, 2), {1e-3});
    CHECK_THROWS_AS((void)forward_measure(o, set), DimensionError);
    CHECK_THROWS_AS((void)backward_measure(o, set, {std::vector<double>(20)}), DimensionError);
    const auto ok = template_set(random_field(4, 4, 2), {1e-3});
    CHECK_THROWS_AS((void)backward_measure(o, ok, {}), DimensionError);
}

TEST_CASE("zero residuals give a zero gradient") {
    const auto o = random_field(6, 6, 1);
    const auto set = template_set(random_field(6, 6, 2), {1e-3, 2e-3});
    const auto g = backward_measure(o, set, std::vector<std::vector<double>>(2, std::vector<double>(36)));
    for (const auto& v : g.data) {
        CHECK(v == Complex(0, 0));
    }
}

TEST_CASE("single plane at z = 0 with unit illumination gives 2 r O") {
    const auto o = random_field(5, 7, 3);
    ComplexField p(5, 7, pitch, lambda);
    std::fill(p.plane.data.begin(), p.plane.data.end(), Complex(1, 0));
    const auto set = template_set(p, {0.0});
    std::vector<double> r(o.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = std::sin(static_cast<double>(i));
    }
    const auto g = backward_measure(o, set, {r});
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(std::abs(g.data[i] - 2.0 * r[i] * o.plane.data[i]) <= 1e-12);
    }
}

TEST_CASE("measurement gradient matches central differences on 8x8") {
    const auto o = random_field(8, 8, 11);
    auto set = template_set(random_field(8, 8, 12), {0.3e-3, 0.9e-3, 1.7e-3});
    set.intensities = forward_measure(random_field(8, 8, 13), set);
    const auto pred = forward_measure(o, set);
    std::vector<std::vector<double>> residuals = pred;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        for (std::size_t i = 0; i < pred[k].size(); ++i) {
            residuals[k][i] = 2.0 * (pred[k][i] - set.intensities[k][i]);
        }
    }
    const auto g = backward_measure(o, set, residuals);
    const double h = 1e-6;
    for (std::size_t i = 0; i < o.size(); ++i) {
        for (const Complex dir : {Complex(1, 0), Complex(0, 1)}) {
            auto plus = o, minus = o;
            plus.plane.data[i] += h * dir;
            minus.plane.data[i] -= h * dir;
            const double numeric = (measurement_loss(plus, set) - measurement_loss(minus, set)) / (2 * h);
            const double analytic = dir.real() != 0 ? g.data[i].real() : g.data[i].imag();
            CHECK(std::abs(analytic - numeric) <= 1e-4 * std::max(std::abs(numeric), 1e-6));
        }
    }
}

TEST_CASE("cached measurement model agrees with the free functions") {
    const auto o = random_field(8, 8, 21);
    auto set = template_set(random_field(8, 8, 22), {0.4e-3, 1.1e-3});
    set.intensities = forward_measure(random_field(8, 8, 23), set);
    const MeasurementModel model(set);
    ComplexPlane grad;
    const double loss = model.loss(o.plane, &grad);
    CHECK(loss == doctest::Approx(measurement_loss(o, set) / (2.0 * 64.0)).epsilon(1e-12));

    const auto pred = forward_measure(o, set);
    auto residuals = pred;
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t i = 0; i < 64; ++i) {
            residuals[k][i] = 2.0 * (pred[k][i] - set.intensities[k][i]) / 128.0;
        }
    }
    const auto ref = backward_measure(o, set, residuals);
    for (std::size_t i = 0; i < 64; ++i) {
        CHECK(std::abs(grad.data[i] - ref.data[i]) <= 1e-10 * (1 + std::abs(ref.data[i])));
    }
}

TEST_CASE("amplitude-phase operator gradient matches central differences") {
    const std::size_t n = 6;
    auto set = template_set(random_field(n, n, 1), {0.6e-3, 1.4e-3});
    set.intensities = forward_measure(random_field(n, n, 2), set);
    DenseMatrix pred(2, n * n);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(0.2, 1.2);
    for (auto& v : pred.values()) {
        v = d(rng);
    }
    for (const auto param : {FieldParam::real_imag, FieldParam::amplitude_phase}) {
        LenslessOperator<double> op(set, param);
        DenseMatrix grad;
        (void)op.evaluate(pred, grad);
        for (std::size_t i = 0; i < n * n; i += 5) {
            for (std::size_t c = 0; c < 2; ++c) {
                auto plus = pred, minus = pred;
                plus(c, i) += 1e-6;
                minus(c, i) -= 1e-6;
                DenseMatrix scratch;
                const double numeric =
                    (op.evaluate(plus, scratch).loss - op.evaluate(minus, scratch).loss) / 2e-6;
                CHECK(std::abs(grad(c, i) - numeric) <= 1e-4 * std::max(std::abs(numeric), 1e-6));
            }
        }
    }
    CHECK(parse_field_param("amplitude_phase") == FieldParam::amplitude_phase);
    CHECK_THROWS_AS((void)parse_field_param("polar"), ValidationError);
}

TEST_CASE("measurement sets round-trip through a directory") {
    const auto obj = synthetic::lensless_object(16, 16, 2);
    const auto set = synthetic::simulate_measurements(obj, synthetic::plane_wave(obj), {0.5e-3, 1e-3});
    const auto dir = std::filesystem::temp_directory_path() / "diner_measure_rt";
    std::filesystem::remove_all(dir);
    save_measurements(set, dir);
    const auto back = load_measurements(dir);
    CHECK(back.distances == set.distances);
    CHECK(back.illumination.wavelength == set.illumination.wavelength);
    CHECK(back.illumination.pixel_pitch == set.illumination.pixel_pitch);
    const double peak = set.peak_intensity();
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t i = 0; i < set.intensities[k].size(); ++i) {
            CHECK(std::abs(back.intensities[k][i] - set.intensities[k][i]) <= peak / 65535.0);
        }
    }
    std::filesystem::remove(dir / "metadata.txt");
    CHECK_THROWS_AS((void)load_measurements(dir), FormatError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("measurement set validation") {
    auto set = template_set(random_field(4, 4, 1), {1e-3, 2e-3});
    set.intensities[1][3] = -1.0;
    CHECK_THROWS_AS(set.validate(), ValidationError);
    set.intensities.pop_back();
    CHECK_THROWS_AS(set.validate(), ValidationError);
}

TEST_CASE("synthetic object has a bar amplitude and a smooth phase") {
    const auto obj = synthetic::lensless_object(64, 64, 1);
    double amin = 1e9, amax = 0, pmax = 0;
    for (const auto& v : obj.plane.data) {
        amin = std::min(amin, std::abs(v));
        amax = std::max(amax, std::abs(v));
        pmax = std::max(pmax, std::abs(std::arg(v)));
    }
    CHECK(amin == doctest::Approx(0.2));
    CHECK(amax == doctest::Approx(1.0));
    CHECK(pmax > 0.3);
    CHECK(pmax < std::numbers::pi);
}

TEST_CASE("illumination-matched constant object is recovered quickly") {
    ComplexField o(16, 16, pitch, lambda);
    std::fill(o.plane.data.begin(), o.plane.data.end(), Complex(1, 0));
    const auto set = synthetic::simulate_measurements(o, synthetic::plane_wave(o), {0.5e-3, 1e-3});
    ModelSpec spec;
    spec.hidden_width = 16;
    spec.activation = Activation::sine(30.0);
    auto model = make_model<double>(spec, GridIndexer({16, 16}), 2, 3);
    TrainConfig cfg;
    cfg.epochs = 300;
    cfg.lr_net = 1e-3;
    cfg.lr_hash = 1e-2;
    cfg.record_time = false;
    const auto sol = solve_phase(set, model, cfg);
    CHECK(sol.log.final_psnr() >= 60.0);
    CHECK(sol.field.height() == 16);
}

TEST_CASE("fewer planes do not reconstruct better") {
    const auto obj = synthetic::lensless_object(32, 32, 4);
    const auto p = synthetic::plane_wave(obj);
    auto run = [&](const std::vector<double>& z) {
        const auto set = synthetic::simulate_measurements(obj, p, z);
        ModelSpec spec;
        spec.activation = Activation::sine(30.0);
        spec.hidden_width = 32;
        spec.hash_init = {HashInit::uniform, -1e-2, 1e-2, 3};
        auto model = make_model<double>(spec, GridIndexer({32, 32}), 2, 7);
        TrainConfig cfg;
        cfg.epochs = 300;
        cfg.lr_net = 1e-3;
        cfg.lr_hash = 1e-2;
        cfg.record_time = false;
        return amplitude_psnr(solve_phase(set, model, cfg).field, obj);
    };
    const double four = run({0.5e-3, 1e-3, 1.5e-3, 2e-3});
    const double two = run({0.5e-3, 1.5e-3});
    CAPTURE(four);
    CAPTURE(two);
    CHECK(two <= four);
}
