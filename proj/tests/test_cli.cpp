#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "diner/cli/commands.hpp"
#include "diner/cli/config.hpp"
#include "diner/cli/experiments.hpp"
#include "diner/errors.hpp"
#include "diner/image_io.hpp"
#include "diner/synthetic.hpp"

using namespace diner;
using namespace diner::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("diner_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

const char* quick_fit = R"(
[experiment]
seed = 7
[data]
synthetic = constant
height = 32
width = 32
value = 0.25
[train]
epochs = 200
lr_net = 1e-3
lr_hash = 1e-2
log_every = 20
record_time = false
)";

int run_quiet(const ExperimentConfig& cfg, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = run(cfg, out, err);
    if (err_text) *err_text = err.str();
    return code;
}

} // namespace

TEST_CASE("config: defaults parse from empty text") {
    const auto cfg = parse_config("");
    CHECK(cfg.task == Task::fit);
    CHECK(cfg.precision == Precision::f64);
    CHECK(cfg.model.kind == ModelKind::diner);
}

TEST_CASE("config: values reach every section") {
    const auto cfg = parse_config(R"(
; comment
[experiment]
task = width-sweep
seed = 42
precision = f32
[model]
kind = positional
activation = sine
omega0 = 20
pe_frequencies = 6
hash_init = uniform
hash_init_scale = 0.5
[train]
epochs = 12
batch_size = 64
[sweep]
widths = 1, 3, 5
[lensless]
distances = 1e-3, 2e-3
parameterization = amplitude_phase
)");
    CHECK(cfg.task == Task::width_sweep);
    CHECK(cfg.seed == 42);
    CHECK(cfg.train.seed == 42);
    CHECK(cfg.precision == Precision::f32);
    CHECK(cfg.model.kind == ModelKind::positional);
    CHECK(cfg.model.activation.omega0 == 20);
    CHECK(cfg.model.pe_frequencies == 6);
    CHECK(cfg.model.hash_init.mode == HashInit::uniform);
    CHECK(cfg.model.hash_init.high == 0.5);
    CHECK(cfg.model.hash_init.low == -0.5);
    CHECK(cfg.train.epochs == 12);
    CHECK(cfg.train.batch_size == 64);
    CHECK(cfg.widths == std::vector<std::size_t>{1, 3, 5});
    CHECK(cfg.lensless.distances == std::vector<double>{1e-3, 2e-3});
    CHECK(cfg.lensless.parameterization == FieldParam::amplitude_phase);
}

TEST_CASE("config: echo parses back to the same settings") {
    const auto cfg = parse_config(quick_fit);
    const auto again = parse_config(cfg.echo());
    CHECK(again.echo() == cfg.echo());
    CHECK(again.hash() == cfg.hash());
    CHECK(cfg.hash().size() == 16);
    CHECK(parse_config("").hash() != cfg.hash());
}

TEST_CASE("config: an empty known section is accepted") {
    CHECK_NOTHROW((void)parse_config("[model]\n[train]\nepochs = 3\n"));
}

TEST_CASE("config: malformed input is a config error") {
    CHECK_THROWS_AS((void)parse_config("[model]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[nonsense]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("epochs = 3\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[train]\nepochs = 3\nepochs = 4\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[train]\nepochs = many\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[train]\nepochs = -1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[train]\nlr_net = 0\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[model]\nactivation = tanh\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[experiment]\ntask = dance\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[experiment]\nprecision = f16\n"), ConfigError);
}

TEST_CASE("config: width 0 is rejected") {
    CHECK_THROWS_AS((void)parse_config("[model]\ntable_width = 0\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[sweep]\nwidths = 1, 0\n"), ConfigError);
}

TEST_CASE("config: spectrum needs a width-2 DINER model") {
    CHECK_THROWS_AS((void)parse_config("[experiment]\ntask = spectrum\n[model]\ntable_width = 3\n"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config("[experiment]\ntask = spectrum\n[model]\nkind = raw\n"),
                    ConfigError);
}

TEST_CASE("config: missing referenced files are data errors") {
    CHECK_THROWS_AS((void)parse_config("[data]\ninput = /no/such/image.ppm\n"), DataError);
    CHECK_THROWS_AS((void)parse_config("[lensless]\nmeasurements = /no/such/dir\n"), DataError);
    CHECK_THROWS_AS((void)load_config("/no/such/config.ini"), DataError);
}

TEST_CASE("fit: constant 32x32 image logs a row at 60 dB or more") {
    auto cfg = parse_config(quick_fit);
    cfg.out_dir = scratch("fit");
    REQUIRE(run_quiet(cfg) == exit_ok);
    std::ifstream is(cfg.out_dir / "metrics.csv");
    const auto log = MetricsLog::read_csv(is);
    REQUIRE_FALSE(log.rows.empty());
    bool reached = false;
    for (const auto& r : log.rows) {
        reached = reached || r.psnr_db >= 60.0;
    }
    CHECK(reached);
    for (const char* f : {"checkpoint.dnc", "reconstruction.ppm", "learned_inr.ppm", "config.ini",
                          "metrics_meta.txt"}) {
        CHECK_MESSAGE(fs::exists(cfg.out_dir / f), f);
    }
    CHECK(slurp(cfg.out_dir / "config.ini") == cfg.echo());
}

TEST_CASE("fit: metrics header is exact and rows parse back") {
    auto cfg = parse_config(quick_fit);
    cfg.out_dir = scratch("header");
    REQUIRE(run_quiet(cfg) == exit_ok);
    const auto text = slurp(cfg.out_dir / "metrics.csv");
    CHECK(text.rfind("epoch,wall_ms,loss,psnr_db\n", 0) == 0);
    std::istringstream is(text);
    const auto log = MetricsLog::read_csv(is);
    std::ostringstream os;
    log.write_csv(os);
    CHECK(os.str() == text);
    CHECK(log.rows.size() == 10);
    CHECK(log.rows.back().epoch == 200);
}

TEST_CASE("fit: same seed gives identical CSV bytes in 64-bit mode") {
    auto cfg = parse_config(quick_fit);
    cfg.data.synthetic = "natural";
    cfg.train.batch_size = 256;
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    cfg.out_dir = a;
    REQUIRE(run_quiet(cfg) == exit_ok);
    cfg.out_dir = b;
    REQUIRE(run_quiet(cfg) == exit_ok);
    const auto bytes = slurp(a / "metrics.csv");
    CHECK(bytes.size() > 100);
    CHECK(bytes == slurp(b / "metrics.csv"));
    CHECK(slurp(a / "checkpoint.dnc") == slurp(b / "checkpoint.dnc"));
}

TEST_CASE("fit: missing input file exits 3") {
    auto cfg = parse_config(quick_fit);
    cfg.data.input = "/no/such/image.pgm";
    cfg.out_dir = scratch("missing");
    std::string err;
    CHECK(run_quiet(cfg, &err) == exit_data);
    CHECK(err.find("image.pgm") != std::string::npos);
}

TEST_CASE("fit: divergence exits 4") {
    auto cfg = parse_config(quick_fit);
    cfg.train.lr_net = 1e300;
    cfg.train.lr_hash = 1e300;
    cfg.train.epochs = 20;
    cfg.out_dir = scratch("diverge");
    std::string err;
    CHECK(run_quiet(cfg, &err) == exit_numeric);
    CHECK(err.find("epoch") != std::string::npos);
}

TEST_CASE("fit: inconsistent task settings exit 2") {
    auto cfg = parse_config(quick_fit);
    cfg.task = Task::disorder_test;
    cfg.model.kind = ModelKind::raw;
    cfg.out_dir = scratch("config_exit");
    CHECK(run_quiet(cfg) == exit_config);
}

TEST_CASE("fit: a PGM input round trips through the command") {
    const auto dir = scratch("pgm_in");
    save_image(synthetic::natural_image(16, 16, 1, 3), dir / "in.pgm");
    auto cfg = parse_config(quick_fit);
    cfg.data.input = dir / "in.pgm";
    cfg.out_dir = dir / "out";
    REQUIRE(run_quiet(cfg) == exit_ok);
    CHECK(load_image(dir / "out" / "reconstruction.pgm").grid().dims() ==
          std::vector<std::size_t>{16, 16});
}

TEST_CASE("disorder-test: passes and reports equal PSNRs") {
    auto cfg = parse_config(quick_fit);
    cfg.task = Task::disorder_test;
    cfg.data.synthetic = "natural";
    cfg.data.height = cfg.data.width = 12;
    cfg.train.epochs = 15;
    cfg.train.batch_size = 32;
    cfg.out_dir = scratch("disorder");
    std::string err;
    REQUIRE(run_quiet(cfg, &err) == exit_ok);
    CHECK(err.find("full batch") != std::string::npos);
    std::ifstream is(cfg.out_dir / "disorder.csv");
    std::string line;
    std::getline(is, line);
    CHECK(line == "arrangement,final_psnr_db");
    std::vector<std::string> values;
    while (std::getline(is, line)) {
        values.push_back(line.substr(line.find(',') + 1));
    }
    REQUIRE(values.size() == 5);
    for (const auto& v : values) {
        CHECK(v == values.front());
    }
}

TEST_CASE("disorder-test: identity permutation trivially passes") {
    auto cfg = parse_config(quick_fit);
    cfg.data.synthetic = "natural";
    cfg.data.height = cfg.data.width = 8;
    cfg.train.epochs = 5;
    cfg.permutations = 0;
    const auto report = run_disorder_test<double>(cfg, load_signal(cfg));
    CHECK(report.passed());
    CHECK(report.max_delta_psnr == 0.0);
    CHECK(report.arrangements.size() == 2);
}

TEST_CASE("disorder report: any mismatch fails") {
    DisorderReport r;
    CHECK(r.passed());
    r.tables_related = false;
    CHECK_FALSE(r.passed());
}

TEST_CASE("width-sweep: one row per width") {
    auto cfg = parse_config(quick_fit);
    cfg.task = Task::width_sweep;
    cfg.data.synthetic = "rank_deficient";
    cfg.data.channels = 4;
    cfg.data.base_channels = 2;
    cfg.data.height = cfg.data.width = 8;
    cfg.train.epochs = 10;
    cfg.widths = {1, 2, 3};
    cfg.out_dir = scratch("sweep");
    REQUIRE(run_quiet(cfg) == exit_ok);
    const auto text = slurp(cfg.out_dir / "sweep.csv");
    CHECK(text.rfind("width,final_psnr_db\n1,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    const auto report = run_width_sweep<double>(cfg, load_signal(cfg));
    CHECK(report.rank == 2);
}

TEST_CASE("spectrum: writes ratios for both images of every entry") {
    auto cfg = parse_config(quick_fit);
    cfg.task = Task::spectrum;
    cfg.data.synthetic = "natural";
    cfg.data.corpus_size = 2;
    cfg.data.height = cfg.data.width = 16;
    cfg.train.epochs = 10;
    cfg.out_dir = scratch("spectrum");
    REQUIRE(run_quiet(cfg) == exit_ok);
    const auto text = slurp(cfg.out_dir / "band_ratios.csv");
    CHECK(text.rfind("label,measure,band_0,band_1,band_2,band_3\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    CHECK(text.find("image_1/learned,|F|,") != std::string::npos);
}

TEST_CASE("lensless: simulated run writes images and measurements") {
    auto cfg = parse_config(quick_fit);
    cfg.task = Task::lensless;
    cfg.data.height = cfg.data.width = 16;
    cfg.train.epochs = 5;
    cfg.out_dir = scratch("lensless");
    REQUIRE(run_quiet(cfg) == exit_ok);
    for (const char* f : {"amplitude.pgm", "phase.pgm", "lensless.txt", "metrics.csv",
                          "measurements/metadata.txt"}) {
        CHECK_MESSAGE(fs::exists(cfg.out_dir / f), f);
    }
    auto again = cfg;
    again.lensless.measurements = cfg.out_dir / "measurements";
    again.out_dir = scratch("lensless_again");
    CHECK(run_quiet(again) == exit_ok);
}

TEST_CASE("bench-hash: zero epochs give ratio 1") {
    auto cfg = parse_config(quick_fit);
    cfg.data.synthetic = "natural";
    cfg.train.epochs = 0;
    cfg.bench.lengths = {1000, 5000};
    cfg.bench.repeats = 5;
    const auto report = run_bench_hash<double>(cfg, load_signal(cfg));
    CHECK(report.ratio == 1.0);
    REQUIRE(report.updates.size() == 2);
    CHECK(report.update_spread >= 1.0);
}

TEST_CASE("f32 precision runs the same pipeline") {
    auto cfg = parse_config(quick_fit);
    cfg.precision = Precision::f32;
    cfg.out_dir = scratch("f32");
    REQUIRE(run_quiet(cfg) == exit_ok);
    CHECK(slurp(cfg.out_dir / "metrics_meta.txt").find("precision = f32") != std::string::npos);
}
