#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "diner/cli/config.hpp"
#include "diner/lensless.hpp"
#include "diner/model.hpp"
#include "diner/train.hpp"

namespace diner::cli {

/// The configured input image, or the configured synthetic image. With
/// `permute` the pixels are rearranged by a seeded random permutation.
[[nodiscard]] GridSignal load_signal(const ExperimentConfig& cfg);

/// `[data] inputs`, or `corpus_size` synthetic natural images.
[[nodiscard]] std::vector<std::pair<std::string, GridSignal>> load_corpus(const ExperimentConfig& cfg);

template <typename Real>
struct FitResult {
    Model<Real> model;
    MetricsLog log;
    double psnr_db = 0; // of the final model, not the last logged epoch
};

template <typename Real>
[[nodiscard]] FitResult<Real> run_fit(const ExperimentConfig& cfg, const GridSignal& signal);

struct Arrangement {
    std::string name;
    MetricsLog log;
    double final_psnr = 0;
};

struct DisorderReport {
    std::vector<Arrangement> arrangements;
    double max_delta_psnr = 0;
    bool traces_identical = true;
    bool backbones_identical = true;
    bool tables_related = true;
    std::optional<std::size_t> first_divergence; // epoch of the first mismatched loss
    std::vector<std::string> warnings;

    [[nodiscard]] bool passed() const {
        return traces_identical && backbones_identical && tables_related;
    }
};

/// Trains the original signal plus its intensity-sorted arrangement and
/// `permutations` seeded shuffles, all from one initialization.
/// Zeros table init and full batch are enforced (with a warning when the
/// config asked otherwise), and every epoch is logged.
template <typename Real>
[[nodiscard]] DisorderReport run_disorder_test(const ExperimentConfig& cfg, const GridSignal& signal);

struct SweepPoint {
    std::size_t width = 0;
    double final_psnr = 0;
};

struct SweepReport {
    std::vector<SweepPoint> points;
    std::size_t rank = 0;
    std::size_t plateau_onset = 0; // smallest width within 1 dB of the best
};

/// One fit per table width, each from the same seed.
template <typename Real>
[[nodiscard]] SweepReport run_width_sweep(const ExperimentConfig& cfg, const GridSignal& signal);

struct SpectrumEntry {
    std::string label;
    double fit_psnr = 0;
    std::vector<double> original;
    std::vector<double> learned;
    GridSignal learned_image; // clamped to [0, 1]
};

struct SpectrumReport {
    std::vector<SpectrumEntry> entries;
    std::size_t low_band_wins = 0; // learned band 0 above the original's
    double mean_original_low = 0;
    double mean_learned_low = 0;
};

/// Fits a width-2 DINER model to every image, extracts the learned INR and
/// compares band ratios of the two.
template <typename Real>
[[nodiscard]] SpectrumReport run_spectrum_study(
    const ExperimentConfig& cfg, const std::vector<std::pair<std::string, GridSignal>>& corpus);

struct LenslessReport {
    MeasurementSet set;
    std::optional<ComplexField> truth;
    PhaseSolution solution;
    double measurement_psnr = 0;
    std::optional<double> amplitude_psnr;
};

/// Recovers an object from `[lensless] measurements`, or from simulated
/// measurements of a synthetic object of the configured size.
template <typename Real>
[[nodiscard]] LenslessReport run_lensless(const ExperimentConfig& cfg);

struct UpdateTiming {
    std::size_t length = 0;
    double micros_per_update = 0;
};

struct BenchReport {
    double diner_ms = 0;
    double backbone_ms = 0;
    double ratio = 1;
    std::vector<UpdateTiming> updates;
    double update_spread = 1; // slowest over fastest per-update time
};

/// Wall time of DINER against the raw-coordinate backbone of the same size
/// over the configured epochs (best of three alternating rounds), and the
/// scatter plus Adam cost of one batch for each table length.
template <typename Real>
[[nodiscard]] BenchReport run_bench_hash(const ExperimentConfig& cfg, const GridSignal& signal);

} // namespace diner::cli
