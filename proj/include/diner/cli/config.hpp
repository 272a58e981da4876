#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "diner/lensless.hpp"
#include "diner/model.hpp"
#include "diner/spectrum.hpp"
#include "diner/train.hpp"

namespace diner::cli {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing or unreadable input data (exit code 3).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Task { fit, disorder_test, width_sweep, spectrum, lensless, bench_hash };

[[nodiscard]] const char* to_string(Task t);
[[nodiscard]] Task parse_task(const std::string& name);

enum class Precision { f32, f64 };

[[nodiscard]] const char* to_string(Precision p);
[[nodiscard]] Precision parse_precision(const std::string& name);

struct DataConfig {
    std::filesystem::path input;               // PGM/PPM; empty selects `synthetic`
    std::vector<std::filesystem::path> inputs; // spectrum corpus
    std::string synthetic = "natural";         // natural | constant | rank_deficient
    std::size_t height = 64;
    std::size_t width = 64;
    std::size_t channels = 3;
    std::size_t base_channels = 2; // rank of rank_deficient images
    double value = 0.5;            // constant images
    std::size_t corpus_size = 10;
    bool permute = false; // randomly rearrange the pixels before fitting
};

struct LenslessConfig {
    std::filesystem::path measurements; // empty simulates a synthetic object
    std::vector<double> distances{0.5e-3, 1e-3, 1.5e-3, 2e-3};
    double wavelength = 532e-9;
    double pixel_pitch = 2e-6;
    FieldParam parameterization = FieldParam::real_imag;
};

struct BenchConfig {
    std::vector<std::size_t> lengths{1000, 100000};
    std::size_t batch = 512;
    std::size_t repeats = 200;
};

struct ExperimentConfig {
    Task task = Task::fit;
    std::uint64_t seed = 0;
    Precision precision = Precision::f64;
    std::filesystem::path out_dir = "out";

    DataConfig data;
    ModelSpec model;
    TrainConfig train;

    std::size_t permutations = 3;   // disorder-test
    std::vector<std::size_t> widths; // width-sweep; empty means 1..channels+2

    std::size_t bands = 4;
    BandMeasure measure = BandMeasure::magnitude;
    std::size_t extract_resolution = 0; // 0 uses the image size

    LenslessConfig lensless;
    BenchConfig bench;

    /// Copies the experiment seed into every seeded component.
    void apply_seed(std::uint64_t s);

    /// Canonical `[section] key = value` text of every effective setting.
    /// The output directory is left out so reruns elsewhere hash alike.
    [[nodiscard]] std::string echo() const;

    /// FNV-1a of echo(), as 16 hex digits.
    [[nodiscard]] std::string hash() const;
};

/// Parses INI text. Unknown sections or keys and malformed values raise
/// ConfigError; referenced input files that do not exist raise DataError.
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Cross-field checks, rerun after command-line overrides. Throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

/// Input paths are checked again after command-line overrides.
void check_inputs(const ExperimentConfig& cfg);

} // namespace diner::cli
