// Command-line front end for DINER experiments.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "diner/cli/commands.hpp"
#include "diner/cli/config.hpp"
#include "diner/runtime.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string precision;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string input;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("-c,--config", o.config, "INI experiment config (defaults apply without one)");
    sub->add_option("--precision", o.precision, "Floating-point precision")
        ->check(CLI::IsMember({"f32", "f64"}));
    sub->add_option("--seed", o.seed, "Experiment seed (overrides [experiment] seed)");
    sub->add_option("--out-dir", o.out_dir, "Output directory");
    sub->add_option("--input", o.input, "Input PGM/PPM image (overrides [data] input)");
}

} // namespace

int main(int argc, char** argv) {
    diner::configure_allocator();
    using namespace diner::cli;

    CLI::App app{"Full-resolution hash-table coordinate networks"};
    app.require_subcommand(1);
    Overrides o;
    const std::pair<const char*, const char*> commands[] = {
        {"run", "Run the task named in the config"},
        {"fit", "Fit one signal; write metrics, checkpoint and images"},
        {"disorder-test", "Train on rearranged pixels and check bit-identical outcomes"},
        {"width-sweep", "Fit once per hash-table width"},
        {"spectrum", "Band energy of images against their learned INRs"},
        {"lensless", "Recover a complex object from multi-height intensities"},
        {"bench-hash", "Time DINER against the plain backbone and table updates"},
    };
    for (const auto& [name, help] : commands) {
        add_common(app.add_subcommand(name, help), o);
    }
    CLI11_PARSE(app, argc, argv);
    const std::string name = app.get_subcommands().front()->get_name();

    ExperimentConfig cfg;
    try {
        cfg = o.config.empty() ? parse_config("") : load_config(o.config);
        if (name != "run") {
            cfg.task = parse_task(name);
        }
        if (!o.precision.empty()) cfg.precision = parse_precision(o.precision);
        if (o.seed) cfg.apply_seed(*o.seed);
        if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
        if (!o.input.empty()) cfg.data.input = o.input;
        validate_config(cfg);
        check_inputs(cfg);
    } catch (...) {
        return exit_code_for_current_exception(std::cerr);
    }
    return run(cfg, std::cout, std::cerr);
}
