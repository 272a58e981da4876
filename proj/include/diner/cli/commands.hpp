#pragma once

#include <iosfwd>

#include "diner/cli/config.hpp"

namespace diner::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_config = 2,
    exit_data = 3,
    exit_numeric = 4,
    exit_disorder = 5,
};

// Commands write files under cfg.out_dir and a short report to `out`.
// Errors propagate as exceptions; run() maps them to exit codes.
int cmd_fit(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_disorder_test(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_width_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_spectrum(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_lensless(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bench_hash(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/// Dispatches on cfg.task and converts exceptions to exit codes:
/// config 2, data 3, numeric divergence 4, anything else 1.
int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/// Exit code for the exception currently being handled.
int exit_code_for_current_exception(std::ostream& err);

} // namespace diner::cli
