#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "diner/model.hpp"
#include "diner/spectrum.hpp"
#include "diner/train.hpp"

namespace diner {

/// Complex plane sampled at `pixel_pitch` metres for light of `wavelength`
/// metres.
struct ComplexField {
    ComplexPlane plane;
    double pixel_pitch = 2e-6;
    double wavelength = 532e-9;

    ComplexField() = default;
    ComplexField(std::size_t h, std::size_t w, double pitch, double lambda)
        : plane(h, w), pixel_pitch(pitch), wavelength(lambda) {}

    [[nodiscard]] std::size_t height() const { return plane.height; }
    [[nodiscard]] std::size_t width() const { return plane.width; }
    [[nodiscard]] std::size_t size() const { return plane.size(); }

    /// Throws ValidationError on non-positive optics or non-finite values.
    void validate() const;
};

/// Intensity planes (row-major, height x width) recorded at each distance
/// under illumination P.
struct MeasurementSet {
    std::vector<double> distances;
    std::vector<std::vector<double>> intensities;
    ComplexField illumination;

    [[nodiscard]] std::size_t height() const { return illumination.height(); }
    [[nodiscard]] std::size_t width() const { return illumination.width(); }
    [[nodiscard]] double peak_intensity() const;

    void validate() const;
};

/// Angular-spectrum transfer function in unshifted FFT layout:
/// exp(i 2 pi z sqrt(1/lambda^2 - fx^2 - fy^2)) on the propagating disk and
/// 0 outside it. Prints a warning when the pitch is finer than the
/// wavelength.
[[nodiscard]] ComplexPlane transfer_function(std::size_t height, std::size_t width, double pitch,
                                             double wavelength, double z);

[[nodiscard]] ComplexField propagate(const ComplexField& field, double z);

/// Adjoint of propagate: filtering with conj(H(z)).
[[nodiscard]] ComplexField propagate_adjoint(const ComplexField& field, double z);

/// I_z = |propagate(P * O, z)|^2 for every distance of `set`; the set's
/// intensities are ignored.
[[nodiscard]] std::vector<std::vector<double>> forward_measure(const ComplexField& object,
                                                               const MeasurementSet& set);

/// Gradient of a loss with dL/dI_z = residuals[z] with respect to O, packed
/// as dL/dRe(O) + i dL/dIm(O).
[[nodiscard]] ComplexPlane backward_measure(const ComplexField& object, const MeasurementSet& set,
                                            const std::vector<std::vector<double>>& residuals);

/// Cached transfer functions for repeated forward/adjoint evaluation.
class MeasurementModel {
public:
    explicit MeasurementModel(MeasurementSet set);

    [[nodiscard]] const MeasurementSet& set() const { return set_; }

    /// Mean squared intensity error over all planes and pixels. When `grad`
    /// is non-null it receives the gradient w.r.t. O (packed as above).
    double loss(const ComplexPlane& object, ComplexPlane* grad) const;

    [[nodiscard]] std::vector<std::vector<double>> measure(const ComplexPlane& object) const;

    /// PSNR of `loss` with the peak measured intensity as the peak.
    [[nodiscard]] double psnr_of(double loss) const;

private:
    std::vector<ComplexPlane> fields(const ComplexPlane& object) const;

    MeasurementSet set_;
    std::vector<ComplexPlane> transfer_;
    double peak_ = 1.0;
};

enum class FieldParam { real_imag, amplitude_phase };

[[nodiscard]] const char* to_string(FieldParam p);
[[nodiscard]] FieldParam parse_field_param(const std::string& name);

/// Object field encoded by a two-channel prediction (2 x N).
template <typename Real>
[[nodiscard]] ComplexPlane decode_field(const Matrix<Real>& prediction, std::size_t height,
                                        std::size_t width, FieldParam param);

/// Measurement loss as a training operator on two-channel predictions.
template <typename Real>
class LenslessOperator final : public ForwardOperator<Real> {
public:
    LenslessOperator(MeasurementSet set, FieldParam param)
        : model_(std::move(set)), param_(param) {}

    OperatorEval evaluate(const Matrix<Real>& prediction, Matrix<Real>& grad) override;

    [[nodiscard]] const MeasurementModel& measurement_model() const { return model_; }

private:
    MeasurementModel model_;
    FieldParam param_;
};

struct PhaseSolution {
    ComplexField field;
    MetricsLog log;
};

/// Fits `model` (two outputs per element) so that its field reproduces the
/// measurements, then decodes the recovered object.
template <typename Real>
[[nodiscard]] PhaseSolution solve_phase(const MeasurementSet& set, Model<Real>& model,
                                        const TrainConfig& cfg,
                                        FieldParam param = FieldParam::real_imag);

namespace synthetic {

/// Bar-target amplitude in [0.2, 1] with a smooth phase of a few Gaussian
/// bumps (peak about 1 rad).
[[nodiscard]] ComplexField lensless_object(std::size_t height, std::size_t width,
                                           std::uint64_t seed, double pitch = 2e-6,
                                           double wavelength = 532e-9);

/// Unit plane-wave illumination matching `object`'s sampling.
[[nodiscard]] ComplexField plane_wave(const ComplexField& object);

[[nodiscard]] MeasurementSet simulate_measurements(const ComplexField& object,
                                                   const ComplexField& illumination,
                                                   const std::vector<double>& distances);

} // namespace synthetic

/// Directory layout: `metadata.txt` (key = value lines), `illumination.grid`
/// and `intensity_<k>.pgm` (16-bit, scaled by `intensity_scale`).
void save_measurements(const MeasurementSet& set, const std::filesystem::path& dir);
[[nodiscard]] MeasurementSet load_measurements(const std::filesystem::path& dir);

/// Amplitude PSNR (peak 1) between two fields of equal shape.
[[nodiscard]] double amplitude_psnr(const ComplexField& estimate, const ComplexField& truth);

} // namespace diner
