#ifndef EWSMOOTH_CLI_HPP
#define EWSMOOTH_CLI_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ewsmooth::cli {

// Exit codes are part of the interface: 0 pass, 1 validation/verdict failure,
// 2 config error, 3 I/O error.
inline constexpr int exit_ok = 0;
inline constexpr int exit_verdict_failure = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_io_error = 3;

struct Options {
    std::string config_path;
    std::string out_dir;                      // --out; falls back to config, then $EWSMOOTH_OUT
    std::vector<std::string> formats;         // --format; empty = config
    std::vector<std::string> checks;          // --checks; empty = config (empty there = all)
    unsigned threads = 0;                     // --threads; 0 = hardware concurrency
    std::optional<std::uint64_t> seed;        // --seed; overrides every scenario
    std::vector<double> scales;               // --scales (sweep only)
};

/// Builds every family, validates the order, and prints the regularity
/// constants and prior-identity residual per scenario.
int cmd_validate(const Options& options, std::ostream& out, std::ostream& err);

/// Runs each scenario, writes one CSV and one JSON report per scenario, and
/// prints one line per selected verdict.
int cmd_run(const Options& options, std::ostream& out, std::ostream& err);

/// Runs the signal-scale sweep for each scenario and writes the sweep tables.
int cmd_sweep(const Options& options, std::ostream& out, std::ostream& err);

} // namespace ewsmooth::cli

#endif
