#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>

#include "diner/cli/experiments.hpp"
#include "diner/errors.hpp"
#include "diner/image_io.hpp"
#include "diner/rng.hpp"
#include "diner/spectrum.hpp"
#include "diner/synthetic.hpp"

namespace diner::cli {

namespace {

GridSignal synthetic_signal(const DataConfig& d, std::uint64_t seed) {
    if (d.synthetic == "constant") {
        return synthetic::constant_image(d.height, d.width, d.channels, d.value);
    }
    if (d.synthetic == "rank_deficient") {
        return synthetic::rank_deficient_image(d.height, d.width, d.base_channels, d.channels, seed);
    }
    return synthetic::natural_image(d.height, d.width, d.channels, seed);
}

GridSignal read_image(const std::filesystem::path& p) {
    try {
        return load_image(p);
    } catch (const FormatError& e) {
        throw DataError(e.what());
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

GridSignal load_signal(const ExperimentConfig& cfg) {
    GridSignal signal = cfg.data.input.empty() ? synthetic_signal(cfg.data, cfg.seed)
                                               : read_image(cfg.data.input);
    if (cfg.data.permute) {
        signal = permute(signal, Permutation::random(signal.size(), cfg.seed));
    }
    return signal;
}

std::vector<std::pair<std::string, GridSignal>> load_corpus(const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, GridSignal>> out;
    if (!cfg.data.inputs.empty()) {
        for (const auto& p : cfg.data.inputs) {
            out.emplace_back(p.stem().string(), read_image(p));
        }
        return out;
    }
    for (std::size_t i = 0; i < cfg.data.corpus_size; ++i) {
        const auto s = substream_seed(cfg.seed, "corpus-" + std::to_string(i));
        out.emplace_back("image_" + std::to_string(i), synthetic_signal(cfg.data, s));
    }
    return out;
}

template <typename Real>
FitResult<Real> run_fit(const ExperimentConfig& cfg, const GridSignal& signal) {
    FitResult<Real> out{make_model<Real>(cfg.model, signal.grid(), signal.channels(), cfg.seed), {}, 0};
    out.log = train(out.model, signal, cfg.train);
    out.log.config_hash = cfg.hash();
    out.psnr_db = evaluate_psnr(out.model, signal);
    return out;
}

template <typename Real>
DisorderReport run_disorder_test(const ExperimentConfig& cfg, const GridSignal& signal) {
    DisorderReport report;
    ModelSpec spec = cfg.model;
    TrainConfig tc = cfg.train;
    if (spec.kind != ModelKind::diner) {
        throw ConfigError("disorder-test needs a DINER model");
    }
    if (spec.hash_init.mode != HashInit::zeros) {
        report.warnings.push_back("hash_init overridden to zeros for the disorder test");
        spec.hash_init.mode = HashInit::zeros;
    }
    if (tc.batch_size != 0 && tc.batch_size != signal.size()) {
        report.warnings.push_back("mini-batch overridden to full batch for the disorder test");
    }
    tc.batch_size = 0;
    tc.log_every = 1;

    std::vector<std::pair<std::string, std::pair<GridSignal, Permutation>>> cases;
    cases.push_back({"original", {signal, Permutation::identity(signal.size())}});
    auto sorted = sort_by_intensity(signal);
    cases.push_back({"sorted", {std::move(sorted.first), std::move(sorted.second)}});
    for (std::size_t k = 0; k < cfg.permutations; ++k) {
        const auto perm = Permutation::random(
            signal.size(), substream_seed(cfg.seed, "arrangement-" + std::to_string(k)));
        cases.push_back({"random_" + std::to_string(k), {permute(signal, perm), perm}});
    }

    std::optional<DinerModel<Real>> reference;
    for (const auto& [name, data] : cases) {
        Model<Real> model = make_model<Real>(spec, data.first.grid(), data.first.channels(), cfg.seed);
        Arrangement a{name, train(model, data.first, tc), 0};
        a.log.config_hash = cfg.hash();
        a.final_psnr = evaluate_psnr(model, data.first);
        auto& dm = std::get<DinerModel<Real>>(model);
        if (!reference) {
            reference = dm;
        } else {
            const auto& ref_log = report.arrangements.front().log;
            // Wall time is the one column allowed to differ.
            const std::size_t n = std::min(a.log.rows.size(), ref_log.rows.size());
            if (a.log.rows.size() != ref_log.rows.size()) {
                report.traces_identical = false;
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (a.log.rows[i].loss != ref_log.rows[i].loss ||
                    a.log.rows[i].psnr_db != ref_log.rows[i].psnr_db) {
                    report.traces_identical = false;
                    const auto epoch = a.log.rows[i].epoch;
                    if (!report.first_divergence || epoch < *report.first_divergence) {
                        report.first_divergence = epoch;
                    }
                    break;
                }
            }
            if (!(dm.backbone == reference->backbone)) {
                report.backbones_identical = false;
            }
            const auto& perm = data.second;
            const auto& t = dm.table.entries();
            const auto& r = reference->table.entries();
            for (std::size_t i = 0; i < perm.size() && report.tables_related; ++i) {
                for (std::size_t c = 0; c < t.cols(); ++c) {
                    if (t(i, c) != r(perm[i], c)) {
                        report.tables_related = false;
                        break;
                    }
                }
            }
        }
        report.arrangements.push_back(std::move(a));
    }
    for (const auto& a : report.arrangements) {
        for (const auto& b : report.arrangements) {
            const double d = std::abs(a.final_psnr - b.final_psnr);
            // Identical infinite PSNRs differ by nothing.
            if (!(a.final_psnr == b.final_psnr)) {
                report.max_delta_psnr = std::max(report.max_delta_psnr, d);
            }
        }
    }
    return report;
}

template <typename Real>
SweepReport run_width_sweep(const ExperimentConfig& cfg, const GridSignal& signal) {
    if (cfg.model.kind != ModelKind::diner) {
        throw ConfigError("width-sweep needs a DINER model");
    }
    std::vector<std::size_t> widths = cfg.widths;
    if (widths.empty()) {
        for (std::size_t w = 1; w <= signal.channels() + 2; ++w) {
            widths.push_back(w);
        }
    }
    SweepReport report;
    report.rank = attribute_rank(signal);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto w : widths) {
        ModelSpec spec = cfg.model;
        spec.table_width = w;
        Model<Real> model = make_model<Real>(spec, signal.grid(), signal.channels(), cfg.seed);
        (void)train(model, signal, cfg.train);
        report.points.push_back({w, evaluate_psnr(model, signal)});
        best = std::max(best, report.points.back().final_psnr);
    }
    for (const auto& p : report.points) {
        if (p.final_psnr >= best - 1.0) {
            report.plateau_onset = p.width;
            break;
        }
    }
    return report;
}

template <typename Real>
SpectrumReport run_spectrum_study(const ExperimentConfig& cfg,
                                  const std::vector<std::pair<std::string, GridSignal>>& corpus) {
    SpectrumReport report;
    for (const auto& [label, signal] : corpus) {
        if (signal.grid().rank() != 2) {
            throw DataError("spectrum: " + label + " is not a 2D image");
        }
        auto fit = run_fit<Real>(cfg, signal);
        const auto& dm = std::get<DinerModel<Real>>(fit.model);
        const std::size_t rh = cfg.extract_resolution ? cfg.extract_resolution : signal.height();
        const std::size_t rw = cfg.extract_resolution ? cfg.extract_resolution : signal.width();
        SpectrumEntry e;
        e.label = label;
        e.fit_psnr = fit.psnr_db;
        e.learned_image = extract_learned_inr(dm, {rh, rw});
        e.learned_image.clamp_unit();
        if (e.learned_image.grid().rank() != 2 || e.learned_image.height() < 2 ||
            e.learned_image.width() < 2) {
            throw NumericError("spectrum: learned INR of " + label + " collapsed to a line");
        }
        e.original = band_ratios(signal, cfg.bands, cfg.measure);
        e.learned = band_ratios(e.learned_image, cfg.bands, cfg.measure);
        report.low_band_wins += e.learned[0] > e.original[0] ? 1 : 0;
        report.mean_original_low += e.original[0];
        report.mean_learned_low += e.learned[0];
        report.entries.push_back(std::move(e));
    }
    if (!report.entries.empty()) {
        report.mean_original_low /= static_cast<double>(report.entries.size());
        report.mean_learned_low /= static_cast<double>(report.entries.size());
    }
    return report;
}

template <typename Real>
LenslessReport run_lensless(const ExperimentConfig& cfg) {
    LenslessReport report;
    if (!cfg.lensless.measurements.empty()) {
        try {
            report.set = load_measurements(cfg.lensless.measurements);
        } catch (const FormatError& e) {
            throw DataError(e.what());
        }
    } else {
        auto object = synthetic::lensless_object(cfg.data.height, cfg.data.width, cfg.seed,
                                                 cfg.lensless.pixel_pitch, cfg.lensless.wavelength);
        report.set = synthetic::simulate_measurements(object, synthetic::plane_wave(object),
                                                      cfg.lensless.distances);
        report.truth = std::move(object);
    }
    const GridIndexer grid({report.set.height(), report.set.width()});
    Model<Real> model = make_model<Real>(cfg.model, grid, 2, cfg.seed);
    report.solution = solve_phase(report.set, model, cfg.train, cfg.lensless.parameterization);
    report.solution.log.config_hash = cfg.hash();
    report.measurement_psnr = report.solution.log.final_psnr();
    if (report.truth) {
        report.amplitude_psnr = amplitude_psnr(report.solution.field, *report.truth);
    }
    return report;
}

template <typename Real>
BenchReport run_bench_hash(const ExperimentConfig& cfg, const GridSignal& signal) {
    BenchReport report;
    ModelSpec diner_spec = cfg.model;
    diner_spec.kind = ModelKind::diner;
    diner_spec.table_width = signal.grid().rank();
    ModelSpec base_spec = diner_spec;
    base_spec.kind = ModelKind::raw;
    TrainConfig tc = cfg.train;
    tc.log_every = std::max<std::size_t>(tc.epochs, 1);

    report.diner_ms = std::numeric_limits<double>::infinity();
    report.backbone_ms = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 3; ++round) {
        {
            auto m = make_model<Real>(diner_spec, signal.grid(), signal.channels(), cfg.seed);
            const auto start = std::chrono::steady_clock::now();
            (void)train(m, signal, tc);
            report.diner_ms = std::min(report.diner_ms, elapsed_ms(start));
        }
        {
            auto m = make_model<Real>(base_spec, signal.grid(), signal.channels(), cfg.seed);
            const auto start = std::chrono::steady_clock::now();
            (void)train(m, signal, tc);
            report.backbone_ms = std::min(report.backbone_ms, elapsed_ms(start));
        }
    }
    report.ratio = tc.epochs == 0 || report.backbone_ms <= 0 ? 1.0 : report.diner_ms / report.backbone_ms;

    // A contiguous window keeps the measurement about the algorithm rather
    // than cache misses of a random gather.
    Rng rng = make_rng(cfg.seed, "bench");
    const std::size_t width = diner_spec.table_width;
    const std::size_t batch = cfg.bench.batch;
    Matrix<Real> grad(width, batch);
    std::normal_distribution<double> normal;
    for (auto& v : grad.values()) {
        v = static_cast<Real>(normal(rng));
    }
    double fastest = std::numeric_limits<double>::infinity();
    double slowest = 0;
    for (const auto n : cfg.bench.lengths) {
        HashTable<Real> table(n, width);
        const std::size_t offset = n == batch ? 0 : static_cast<std::size_t>(rng() % (n - batch));
        std::vector<std::size_t> idx(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            idx[i] = offset + i;
        }
        table.apply_adam(table.scatter_grad(idx, grad)); // warm-up
        double best = std::numeric_limits<double>::infinity();
        for (int round = 0; round < 3; ++round) {
            const auto start = std::chrono::steady_clock::now();
            for (std::size_t r = 0; r < cfg.bench.repeats; ++r) {
                table.apply_adam(table.scatter_grad(idx, grad));
            }
            best = std::min(best, elapsed_ms(start) * 1000.0 / static_cast<double>(cfg.bench.repeats));
        }
        report.updates.push_back({n, best});
        fastest = std::min(fastest, best);
        slowest = std::max(slowest, best);
    }
    report.update_spread = fastest > 0 ? slowest / fastest : 1.0;
    return report;
}

#define DINER_INSTANTIATE(Real)                                                                 \
    template FitResult<Real> run_fit<Real>(const ExperimentConfig&, const GridSignal&);         \
    template DisorderReport run_disorder_test<Real>(const ExperimentConfig&, const GridSignal&);\
    template SweepReport run_width_sweep<Real>(const ExperimentConfig&, const GridSignal&);     \
    template SpectrumReport run_spectrum_study<Real>(                                           \
        const ExperimentConfig&, const std::vector<std::pair<std::string, GridSignal>>&);       \
    template LenslessReport run_lensless<Real>(const ExperimentConfig&);                        \
    template BenchReport run_bench_hash<Real>(const ExperimentConfig&, const GridSignal&);

DINER_INSTANTIATE(float)
DINER_INSTANTIATE(double)

#undef DINER_INSTANTIATE

} // namespace diner::cli
