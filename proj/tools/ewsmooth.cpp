#include <iostream>

#include "CLI11.hpp"

#include "ewsmooth/cli.hpp"
#include "ewsmooth/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Exponential-weighting aggregation of ordered smoothers"};
    app.set_version_flag("--version", ewsmooth::library_version);
    app.require_subcommand(1);

    ewsmooth::cli::Options options;

    auto* validate = app.add_subcommand(
        "validate", "Build and validate the families of every scenario in a config");
    validate->add_option("config", options.config_path, "Config file (JSON)")->required();

    auto* run = app.add_subcommand("run", "Run scenarios and write CSV/JSON reports");
    run->add_option("config", options.config_path, "Config file (JSON)")->required();
    run->add_option("--out", options.out_dir, "Output directory");
    run->add_option("--format", options.formats, "Output formats (csv,json)")->delimiter(',');
    run->add_option("--checks", options.checks, "Verdicts to evaluate")->delimiter(',');
    run->add_option("--threads", options.threads, "Worker threads (0 = auto)");
    std::uint64_t seed_value = 0;
    auto* run_seed = run->add_option("--seed", seed_value, "Override every scenario seed");

    auto* sweep = app.add_subcommand("sweep", "Run the signal-scale remainder sweep");
    sweep->add_option("config", options.config_path, "Config file (JSON)")->required();
    sweep->add_option("--scales", options.scales, "Signal scales (overrides config)")
        ->delimiter(',');
    sweep->add_option("--out", options.out_dir, "Output directory");
    sweep->add_option("--format", options.formats, "Output formats (csv,json)")->delimiter(',');
    sweep->add_option("--checks", options.checks, "Verdicts to evaluate")->delimiter(',');
    sweep->add_option("--threads", options.threads, "Worker threads (0 = auto)");
    auto* sweep_seed = sweep->add_option("--seed", seed_value, "Override every scenario seed");

    CLI11_PARSE(app, argc, argv);

    if (run_seed->count() > 0 || sweep_seed->count() > 0) options.seed = seed_value;

    if (validate->parsed()) return ewsmooth::cli::cmd_validate(options, std::cout, std::cerr);
    if (run->parsed()) return ewsmooth::cli::cmd_run(options, std::cout, std::cerr);
    if (sweep->parsed()) return ewsmooth::cli::cmd_sweep(options, std::cout, std::cerr);
    return ewsmooth::cli::exit_config_error;
}
