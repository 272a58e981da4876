#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

#include "diner/errors.hpp"
#include "diner/lensless.hpp"
#include "diner/rng.hpp"

namespace diner {

namespace {

void require_same_plane(const ComplexPlane& a, std::size_t h, std::size_t w, const char* what) {
    if (a.height != h || a.width != w) {
        throw DimensionError(std::string(what) + ": plane " + std::to_string(a.height) + "x" +
                             std::to_string(a.width) + " does not match " + std::to_string(h) +
                             "x" + std::to_string(w));
    }
}

ComplexPlane filter(ComplexPlane plane, const ComplexPlane& h, bool conjugate) {
    fft2_inplace(plane, false);
    for (std::size_t i = 0; i < plane.size(); ++i) {
        plane.data[i] *= conjugate ? std::conj(h.data[i]) : h.data[i];
    }
    fft2_inplace(plane, true);
    return plane;
}

ComplexPlane modulate(const ComplexPlane& object, const ComplexPlane& illumination) {
    ComplexPlane v(object.height, object.width);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v.data[i] = illumination.data[i] * object.data[i];
    }
    return v;
}

} // namespace

void ComplexField::validate() const {
    if (!(pixel_pitch > 0) || !(wavelength > 0)) {
        throw ValidationError("ComplexField: pitch and wavelength must be positive");
    }
    for (const auto& v : plane.data) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw ValidationError("ComplexField: non-finite value");
        }
    }
}

double MeasurementSet::peak_intensity() const {
    double peak = 0.0;
    for (const auto& plane : intensities) {
        for (const double v : plane) {
            peak = std::max(peak, v);
        }
    }
    return peak;
}

void MeasurementSet::validate() const {
    illumination.validate();
    if (intensities.size() != distances.size()) {
        throw ValidationError("MeasurementSet: " + std::to_string(intensities.size()) +
                              " intensity planes for " + std::to_string(distances.size()) +
                              " distances");
    }
    for (const auto& plane : intensities) {
        if (plane.size() != illumination.size()) {
            throw DimensionError("MeasurementSet: intensity plane of " +
                                 std::to_string(plane.size()) + " values for a " +
                                 std::to_string(height()) + "x" + std::to_string(width()) +
                                 " field");
        }
        for (const double v : plane) {
            if (!(v >= 0) || !std::isfinite(v)) {
                throw ValidationError("MeasurementSet: intensities must be finite and >= 0");
            }
        }
    }
}

ComplexPlane transfer_function(std::size_t height, std::size_t width, double pitch,
                               double wavelength, double z) {
    if (!(pitch > 0) || !(wavelength > 0)) {
        throw ValidationError("transfer_function: pitch and wavelength must be positive");
    }
    if (pitch < wavelength) {
        std::cerr << "warning: pixel pitch " << pitch << " m is finer than the wavelength "
                  << wavelength << " m; evanescent components are discarded\n";
    }
    ComplexPlane h(height, width);
    const double inv_l2 = 1.0 / (wavelength * wavelength);
    auto freq = [](std::size_t k, std::size_t n, double d) {
        const long kk = k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
        return static_cast<double>(kk) / (static_cast<double>(n) * d);
    };
    for (std::size_t y = 0; y < height; ++y) {
        const double fy = freq(y, height, pitch);
        for (std::size_t x = 0; x < width; ++x) {
            const double fx = freq(x, width, pitch);
            const double arg = inv_l2 - fx * fx - fy * fy;
            if (arg >= 0) {
                h(y, x) = std::polar(1.0, 2.0 * std::numbers::pi * z * std::sqrt(arg));
            }
        }
    }
    return h;
}

ComplexField propagate(const ComplexField& field, double z) {
    field.validate();
    ComplexField out = field;
    out.plane = filter(field.plane,
                       transfer_function(field.height(), field.width(), field.pixel_pitch,
                                         field.wavelength, z),
                       false);
    return out;
}

ComplexField propagate_adjoint(const ComplexField& field, double z) {
    field.validate();
    ComplexField out = field;
    out.plane = filter(field.plane,
                       transfer_function(field.height(), field.width(), field.pixel_pitch,
                                         field.wavelength, z),
                       true);
    return out;
}

std::vector<std::vector<double>> forward_measure(const ComplexField& object,
                                                 const MeasurementSet& set) {
    require_same_plane(object.plane, set.height(), set.width(), "forward_measure");
    MeasurementSet shape = set;
    shape.intensities.assign(set.distances.size(), std::vector<double>(set.illumination.size()));
    return MeasurementModel(std::move(shape)).measure(object.plane);
}

ComplexPlane backward_measure(const ComplexField& object, const MeasurementSet& set,
                              const std::vector<std::vector<double>>& residuals) {
    require_same_plane(object.plane, set.height(), set.width(), "backward_measure");
    if (residuals.size() != set.distances.size()) {
        throw DimensionError("backward_measure: " + std::to_string(residuals.size()) +
                             " residual planes for " + std::to_string(set.distances.size()) +
                             " distances");
    }
    const auto& p = set.illumination;
    const ComplexPlane v = modulate(object.plane, p.plane);
    ComplexPlane spectrum(v.height, v.width);
    ComplexPlane vf = fft2(v);
    for (std::size_t k = 0; k < set.distances.size(); ++k) {
        if (residuals[k].size() != v.size()) {
            throw DimensionError("backward_measure: residual plane " + std::to_string(k) +
                                 " has " + std::to_string(residuals[k].size()) + " values");
        }
        const auto h = transfer_function(v.height, v.width, p.pixel_pitch, p.wavelength,
                                         set.distances[k]);
        ComplexPlane u(v.height, v.width);
        for (std::size_t i = 0; i < u.size(); ++i) {
            u.data[i] = vf.data[i] * h.data[i];
        }
        fft2_inplace(u, true);
        for (std::size_t i = 0; i < u.size(); ++i) {
            u.data[i] *= 2.0 * residuals[k][i];
        }
        fft2_inplace(u, false);
        for (std::size_t i = 0; i < u.size(); ++i) {
            spectrum.data[i] += u.data[i] * std::conj(h.data[i]);
        }
    }
    fft2_inplace(spectrum, true);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        spectrum.data[i] *= std::conj(p.plane.data[i]);
    }
    return spectrum;
}

MeasurementModel::MeasurementModel(MeasurementSet set) : set_(std::move(set)) {
    set_.validate();
    const auto& p = set_.illumination;
    for (const double z : set_.distances) {
        transfer_.push_back(transfer_function(p.height(), p.width(), p.pixel_pitch, p.wavelength, z));
    }
    peak_ = set_.peak_intensity();
    if (!(peak_ > 0)) {
        peak_ = 1.0;
    }
}

std::vector<ComplexPlane> MeasurementModel::fields(const ComplexPlane& object) const {
    require_same_plane(object, set_.height(), set_.width(), "MeasurementModel");
    const ComplexPlane vf = fft2(modulate(object, set_.illumination.plane));
    std::vector<ComplexPlane> out;
    out.reserve(transfer_.size());
    for (const auto& h : transfer_) {
        ComplexPlane u(vf.height, vf.width);
        for (std::size_t i = 0; i < u.size(); ++i) {
            u.data[i] = vf.data[i] * h.data[i];
        }
        fft2_inplace(u, true);
        out.push_back(std::move(u));
    }
    return out;
}

std::vector<std::vector<double>> MeasurementModel::measure(const ComplexPlane& object) const {
    std::vector<std::vector<double>> out;
    for (const auto& u : fields(object)) {
        std::vector<double> plane(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            plane[i] = std::norm(u.data[i]);
        }
        out.push_back(std::move(plane));
    }
    return out;
}

double MeasurementModel::loss(const ComplexPlane& object, ComplexPlane* grad) const {
    const auto u = fields(object);
    const std::size_t n = object.size();
    const double count = static_cast<double>(n * u.size());
    double sum = 0.0;
    ComplexPlane spectrum(object.height, object.width);
    for (std::size_t k = 0; k < u.size(); ++k) {
        ComplexPlane g(object.height, object.width);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::norm(u[k].data[i]) - set_.intensities[k][i];
            sum += r * r;
            // dL/dI = 2 r / count and dI/dU* packs to 2 U.
            g.data[i] = (4.0 * r / count) * u[k].data[i];
        }
        if (grad != nullptr) {
            fft2_inplace(g, false);
            for (std::size_t i = 0; i < n; ++i) {
                spectrum.data[i] += g.data[i] * std::conj(transfer_[k].data[i]);
            }
        }
    }
    if (grad != nullptr) {
        fft2_inplace(spectrum, true);
        for (std::size_t i = 0; i < n; ++i) {
            spectrum.data[i] *= std::conj(set_.illumination.plane.data[i]);
        }
        *grad = std::move(spectrum);
    }
    return sum / count;
}

double MeasurementModel::psnr_of(double loss) const { return psnr_from_mse(loss, peak_); }

const char* to_string(FieldParam p) {
    return p == FieldParam::real_imag ? "real_imag" : "amplitude_phase";
}

FieldParam parse_field_param(const std::string& name) {
    if (name == "real_imag") {
        return FieldParam::real_imag;
    }
    if (name == "amplitude_phase") {
        return FieldParam::amplitude_phase;
    }
    throw ValidationError("unknown field parameterization '" + name +
                          "' (expected real_imag or amplitude_phase)");
}

template <typename Real>
ComplexPlane decode_field(const Matrix<Real>& prediction, std::size_t height, std::size_t width,
                          FieldParam param) {
    if (prediction.rows() != 2 || prediction.cols() != height * width) {
        throw DimensionError("decode_field: prediction " + prediction.shape_string() +
                             " for a " + std::to_string(height) + "x" + std::to_string(width) +
                             " field with two channels");
    }
    ComplexPlane out(height, width);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double a = static_cast<double>(prediction(0, i));
        const double b = static_cast<double>(prediction(1, i));
        out.data[i] = param == FieldParam::real_imag ? Complex(a, b) : std::polar(a, b);
    }
    return out;
}

template <typename Real>
OperatorEval LenslessOperator<Real>::evaluate(const Matrix<Real>& prediction, Matrix<Real>& grad) {
    const auto& set = model_.set();
    const auto object = decode_field(prediction, set.height(), set.width(), param_);
    ComplexPlane g;
    const double loss = model_.loss(object, &g);
    grad = Matrix<Real>(2, object.size());
    for (std::size_t i = 0; i < object.size(); ++i) {
        if (param_ == FieldParam::real_imag) {
            grad(0, i) = static_cast<Real>(g.data[i].real());
            grad(1, i) = static_cast<Real>(g.data[i].imag());
        } else {
            // O = a e^{i phi}: dL/da = Re(g conj(e^{i phi})), dL/dphi = Re(g conj(i O)).
            const double a = static_cast<double>(prediction(0, i));
            const double phi = static_cast<double>(prediction(1, i));
            const Complex e = std::polar(1.0, phi);
            grad(0, i) = static_cast<Real>((g.data[i] * std::conj(e)).real());
            grad(1, i) = static_cast<Real>((g.data[i] * std::conj(Complex(0, 1) * a * e)).real());
        }
    }
    return {loss, model_.psnr_of(loss)};
}

template <typename Real>
PhaseSolution solve_phase(const MeasurementSet& set, Model<Real>& model, const TrainConfig& cfg,
                          FieldParam param) {
    LenslessOperator<Real> op(set, param);
    const GridSignal shape(GridIndexer({set.height(), set.width()}),
                           DenseMatrix(set.height() * set.width(), 2));
    PhaseSolution out;
    out.log = train(model, shape, cfg, &op);
    std::vector<std::size_t> all(shape.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    out.field = set.illumination;
    out.field.plane = decode_field(predict(model, all), set.height(), set.width(), param);
    return out;
}

namespace synthetic {

ComplexField lensless_object(std::size_t height, std::size_t width, std::uint64_t seed,
                             double pitch, double wavelength) {
    ComplexField f(height, width, pitch, wavelength);
    auto rng = make_rng(seed, "lensless-object");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = static_cast<double>(height);
    const double w = static_cast<double>(width);

    // Groups of three bars at shrinking periods, alternating orientation.
    std::vector<double> amp(height * width, 1.0);
    const std::size_t groups = 4;
    for (std::size_t g = 0; g < groups; ++g) {
        const double period = std::max(2.0, std::floor(std::min(h, w) / (6.0 + 3.0 * static_cast<double>(g))));
        const double cy = (0.2 + 0.6 * u(rng)) * h;
        const double cx = (0.2 + 0.6 * u(rng)) * w;
        const bool vertical = g % 2 == 0;
        const double length = 2.5 * period;
        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                const double dy = static_cast<double>(y) - cy;
                const double dx = static_cast<double>(x) - cx;
                const double across = vertical ? dx : dy;
                const double along = vertical ? dy : dx;
                if (std::abs(along) > length || std::abs(across) >= 2.5 * period) {
                    continue;
                }
                const double cell = std::floor((across + 2.5 * period) / period);
                if (static_cast<long>(cell) % 2 == 0) {
                    amp[y * width + x] = 0.2;
                }
            }
        }
    }
    std::vector<double> phase(height * width, 0.0);
    for (int b = 0; b < 3; ++b) {
        const double cy = u(rng) * h;
        const double cx = u(rng) * w;
        const double s = (0.1 + 0.15 * u(rng)) * std::min(h, w);
        const double a = (b % 2 == 0 ? 1.0 : -0.6) * (0.6 + 0.4 * u(rng));
        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                const double dy = static_cast<double>(y) - cy;
                const double dx = static_cast<double>(x) - cx;
                phase[y * width + x] += a * std::exp(-(dy * dy + dx * dx) / (2 * s * s));
            }
        }
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.plane.data[i] = std::polar(amp[i], phase[i]);
    }
    return f;
}

ComplexField plane_wave(const ComplexField& object) {
    ComplexField p(object.height(), object.width(), object.pixel_pitch, object.wavelength);
    std::fill(p.plane.data.begin(), p.plane.data.end(), Complex(1.0, 0.0));
    return p;
}

MeasurementSet simulate_measurements(const ComplexField& object, const ComplexField& illumination,
                                     const std::vector<double>& distances) {
    MeasurementSet set;
    set.distances = distances;
    set.illumination = illumination;
    set.intensities.assign(distances.size(), std::vector<double>(illumination.size(), 0.0));
    set.intensities = forward_measure(object, set);
    return set;
}

} // namespace synthetic

double amplitude_psnr(const ComplexField& estimate, const ComplexField& truth) {
    require_same_plane(estimate.plane, truth.height(), truth.width(), "amplitude_psnr");
    std::vector<double> a(truth.size()), b(truth.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::abs(estimate.plane.data[i]);
        b[i] = std::abs(truth.plane.data[i]);
    }
    return psnr(a, b);
}

#define DINER_INSTANTIATE(Real)                                                                \
    template ComplexPlane decode_field(const Matrix<Real>&, std::size_t, std::size_t,          \
                                       FieldParam);                                            \
    template class LenslessOperator<Real>;                                                     \
    template PhaseSolution solve_phase(const MeasurementSet&, Model<Real>&, const TrainConfig&, \
                                       FieldParam);

DINER_INSTANTIATE(float)
DINER_INSTANTIATE(double)

#undef DINER_INSTANTIATE

} // namespace diner
