#include "diner/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "diner/checkpoint.hpp"
#include "diner/cli/experiments.hpp"
#include "diner/errors.hpp"
#include "diner/image_io.hpp"

namespace diner::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw DataError("cannot write " + path.string());
    }
    return os;
}

fs::path prepare_out_dir(const ExperimentConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) {
        throw DataError("cannot create " + cfg.out_dir.string() + ": " + ec.message());
    }
    auto os = open_out(cfg.out_dir / "config.ini");
    os << cfg.echo();
    return cfg.out_dir;
}

// The CSV header is fixed, so run metadata goes next to it.
void write_metrics(const fs::path& dir, const std::string& stem, const MetricsLog& log) {
    {
        auto os = open_out(dir / (stem + ".csv"));
        log.write_csv(os);
    }
    auto os = open_out(dir / (stem + "_meta.txt"));
    os << "seed = " << log.seed << "\nconfig_hash = " << log.config_hash
       << "\nprecision = " << log.precision << '\n';
}

void stamp(MetricsLog& log, const ExperimentConfig& cfg) {
    log.seed = cfg.seed;
    log.config_hash = cfg.hash();
    log.precision = to_string(cfg.precision);
}

// PGM/PPM for 2D images with 1 or 3 channels, a raw grid blob otherwise.
fs::path save_signal(const GridSignal& signal, const fs::path& stem) {
    if (signal.grid().rank() == 2 && (signal.channels() == 1 || signal.channels() == 3)) {
        fs::path p = stem;
        p += signal.channels() == 1 ? ".pgm" : ".ppm";
        save_image(signal, p);
        return p;
    }
    fs::path p = stem;
    p += ".grid";
    save_grid(signal, p);
    return p;
}

std::ostream& db(std::ostream& os, double v) {
    return os << std::fixed << std::setprecision(2) << v << std::defaultfloat << " dB";
}

template <typename Real>
int fit(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    const GridSignal signal = load_signal(cfg);
    const auto dir = prepare_out_dir(cfg);
    auto result = run_fit<Real>(cfg, signal);
    stamp(result.log, cfg);
    write_metrics(dir, "metrics", result.log);
    save_checkpoint(result.model, cfg.echo(), dir / "checkpoint.dnc");
    auto recon = predict_signal(result.model, signal.grid());
    recon.clamp_unit();
    save_signal(recon, dir / "reconstruction");
    if (const auto* dm = std::get_if<DinerModel<Real>>(&result.model)) {
        if (dm->table.width() == 2) {
            const std::size_t r = cfg.extract_resolution;
            const std::vector<std::size_t> res =
                signal.grid().rank() == 2 && r == 0
                    ? std::vector<std::size_t>{signal.height(), signal.width()}
                    : std::vector<std::size_t>{r ? r : 256, r ? r : 256};
            auto learned = extract_learned_inr(*dm, res);
            learned.clamp_unit();
            save_signal(learned, dir / "learned_inr");
        } else {
            err << "note: learned INR image is only written for table width 2\n";
        }
    }
    out << "final PSNR ";
    db(out, result.psnr_db) << '\n';
    return exit_ok;
}

template <typename Real>
int disorder(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    const GridSignal signal = load_signal(cfg);
    const auto dir = prepare_out_dir(cfg);
    auto report = run_disorder_test<Real>(cfg, signal);
    for (const auto& w : report.warnings) {
        err << "warning: " << w << '\n';
    }
    {
        auto os = open_out(dir / "disorder.csv");
        os << "arrangement,final_psnr_db\n" << std::setprecision(17);
        for (auto& a : report.arrangements) {
            os << a.name << ',' << a.final_psnr << '\n';
            stamp(a.log, cfg);
            write_metrics(dir, "metrics_" + a.name, a.log);
        }
    }
    for (const auto& a : report.arrangements) {
        out << a.name << ": ";
        db(out, a.final_psnr) << '\n';
    }
    out << "max |dPSNR| = " << std::setprecision(17) << report.max_delta_psnr
        << std::defaultfloat << " dB\n";
    out << "loss traces " << (report.traces_identical ? "bit-identical" : "DIFFER")
        << ", backbones " << (report.backbones_identical ? "bit-identical" : "DIFFER")
        << ", tables " << (report.tables_related ? "exact permutations" : "NOT related") << '\n';
    if (!report.passed()) {
        err << "disorder invariance violated";
        if (report.first_divergence) {
            err << " at epoch " << *report.first_divergence;
        }
        err << '\n';
        return exit_disorder;
    }
    return exit_ok;
}

template <typename Real>
int sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream&) {
    const GridSignal signal = load_signal(cfg);
    const auto dir = prepare_out_dir(cfg);
    const auto report = run_width_sweep<Real>(cfg, signal);
    auto os = open_out(dir / "sweep.csv");
    os << "width,final_psnr_db\n" << std::setprecision(17);
    for (const auto& p : report.points) {
        os << p.width << ',' << p.final_psnr << '\n';
        out << "L=" << p.width << ": ";
        db(out, p.final_psnr) << '\n';
    }
    out << "attribute rank " << report.rank << ", plateau onset L=" << report.plateau_onset
        << (report.plateau_onset == report.rank ? " (matches rank)\n" : " (differs from rank)\n");
    return exit_ok;
}

template <typename Real>
int spectrum(const ExperimentConfig& cfg, std::ostream& out, std::ostream&) {
    const auto corpus = load_corpus(cfg);
    const auto dir = prepare_out_dir(cfg);
    const auto report = run_spectrum_study<Real>(cfg, corpus);
    fs::create_directories(dir / "learned");
    auto os = open_out(dir / "band_ratios.csv");
    bool header = true;
    for (const auto& e : report.entries) {
        write_band_ratios_csv(e.original, e.label + "/original", cfg.measure, os, header);
        header = false;
        write_band_ratios_csv(e.learned, e.label + "/learned", cfg.measure, os, false);
        save_signal(e.learned_image, dir / "learned" / e.label);
        out << e.label << ": fit ";
        db(out, e.fit_psnr) << std::setprecision(4) << ", band 0 " << e.original[0] << " -> "
                            << e.learned[0] << std::defaultfloat << '\n';
    }
    out << "learned INR lower-band ratio higher in " << report.low_band_wins << " of "
        << report.entries.size() << "; mean " << std::setprecision(4) << report.mean_original_low
        << " -> " << report.mean_learned_low << std::defaultfloat << " (" << to_string(cfg.measure)
        << ")\n";
    return exit_ok;
}

GridSignal plane_image(const ComplexPlane& plane, bool phase) {
    DenseMatrix values(plane.size(), 1);
    double peak = 0;
    for (const auto& c : plane.data) {
        peak = std::max(peak, std::abs(c));
    }
    for (std::size_t i = 0; i < plane.size(); ++i) {
        values(i, 0) = phase ? (std::arg(plane.data[i]) + std::numbers::pi) / (2 * std::numbers::pi)
                             : (peak > 0 ? std::abs(plane.data[i]) / peak : 0.0);
    }
    return GridSignal(GridIndexer({plane.height, plane.width}), std::move(values));
}

template <typename Real>
int lensless(const ExperimentConfig& cfg, std::ostream& out, std::ostream&) {
    const auto dir = prepare_out_dir(cfg);
    auto report = run_lensless<Real>(cfg);
    stamp(report.solution.log, cfg);
    write_metrics(dir, "metrics", report.solution.log);
    save_image(plane_image(report.solution.field.plane, false), dir / "amplitude.pgm", 16);
    save_image(plane_image(report.solution.field.plane, true), dir / "phase.pgm", 16);
    if (cfg.lensless.measurements.empty()) {
        save_measurements(report.set, dir / "measurements");
    }
    auto os = open_out(dir / "lensless.txt");
    os << "propagation = angular spectrum, evanescent components zeroed\n"
       << "parameterization = " << to_string(cfg.lensless.parameterization) << '\n'
       << std::setprecision(17) << "measurement_psnr_db = " << report.measurement_psnr << '\n';
    out << "measurement PSNR ";
    db(out, report.measurement_psnr) << '\n';
    if (report.amplitude_psnr) {
        os << "amplitude_psnr_db = " << *report.amplitude_psnr << '\n';
        out << "amplitude PSNR ";
        db(out, *report.amplitude_psnr) << '\n';
    }
    return exit_ok;
}

template <typename Real>
int bench(const ExperimentConfig& cfg, std::ostream& out, std::ostream&) {
    const GridSignal signal = load_signal(cfg);
    const auto dir = prepare_out_dir(cfg);
    const auto report = run_bench_hash<Real>(cfg, signal);
    auto os = open_out(dir / "bench.csv");
    os << "quantity,value\n" << std::setprecision(17);
    os << "diner_ms," << report.diner_ms << "\nbackbone_ms," << report.backbone_ms << "\nratio,"
       << report.ratio << '\n';
    for (const auto& u : report.updates) {
        os << "update_us_n" << u.length << ',' << u.micros_per_update << '\n';
    }
    os << "update_spread," << report.update_spread << '\n';
    out << std::setprecision(4) << "DINER " << report.diner_ms << " ms, backbone "
        << report.backbone_ms << " ms, ratio " << report.ratio << '\n';
    for (const auto& u : report.updates) {
        out << "scatter+Adam N=" << u.length << ": " << u.micros_per_update << " us\n";
    }
    out << "update spread " << report.update_spread << std::defaultfloat << '\n';
    return exit_ok;
}

template <template <typename> class Fn>
int dispatch(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    return cfg.precision == Precision::f32 ? Fn<float>{}(cfg, out, err) : Fn<double>{}(cfg, out, err);
}

#define DINER_COMMAND(name, impl)                                                        \
    template <typename Real>                                                             \
    struct name##_fn {                                                                   \
        int operator()(const ExperimentConfig& c, std::ostream& o, std::ostream& e) {    \
            return impl<Real>(c, o, e);                                                  \
        }                                                                                \
    };

DINER_COMMAND(fit, fit)
DINER_COMMAND(disorder, disorder)
DINER_COMMAND(sweep, sweep)
DINER_COMMAND(spectrum, spectrum)
DINER_COMMAND(lensless, lensless)
DINER_COMMAND(bench, bench)

#undef DINER_COMMAND

} // namespace

int cmd_fit(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    return dispatch<fit_fn>(cfg, out, err);
}
int cmd_disorder_test(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    return dispatch<disorder_fn>(cfg, out, err);
}
int cmd_width_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    return dispatch<sweep_fn>(cfg, out, err);
}
int cmd_spectrum(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    return dispatch<spectrum_fn>(cfg, out, err);
}
int cmd_lensless(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    return dispatch<lensless_fn>(cfg, out, err);
}
int cmd_bench_hash(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    return dispatch<bench_fn>(cfg, out, err);
}

int exit_code_for_current_exception(std::ostream& err) {
    try {
        throw;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const ValidationError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const FormatError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const BindingError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const DimensionError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const NumericError& e) {
        err << "numeric divergence: " << e.what() << '\n';
        return exit_numeric;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    } catch (...) {
        err << "internal error\n";
        return exit_internal;
    }
}

int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        switch (cfg.task) {
        case Task::fit: return cmd_fit(cfg, out, err);
        case Task::disorder_test: return cmd_disorder_test(cfg, out, err);
        case Task::width_sweep: return cmd_width_sweep(cfg, out, err);
        case Task::spectrum: return cmd_spectrum(cfg, out, err);
        case Task::lensless: return cmd_lensless(cfg, out, err);
        case Task::bench_hash: return cmd_bench_hash(cfg, out, err);
        }
        throw InternalError("unhandled task");
    } catch (...) {
        return exit_code_for_current_exception(err);
    }
}

} // namespace diner::cli
