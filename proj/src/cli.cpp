#include "ewsmooth/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "ewsmooth/config.hpp"
#include "ewsmooth/report_io.hpp"

namespace ewsmooth::cli {

namespace {

namespace fs = std::filesystem;

std::string short_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

fs::path resolve_out_dir(const Options& options, const RunConfig& config) {
    if (!options.out_dir.empty()) return options.out_dir;
    if (!config.output_dir.empty()) return config.output_dir;
    if (const char* env = std::getenv("EWSMOOTH_OUT"); env && *env) return env;
    return ".";
}

std::vector<std::string> resolve_checks(const Options& options, const RunConfig& config) {
    std::vector<std::string> checks = !options.checks.empty() ? options.checks : config.checks;
    if (checks.empty()) return known_checks();
    for (const auto& name : checks) {
        if (std::find(known_checks().begin(), known_checks().end(), name) ==
            known_checks().end()) {
            throw ConfigError("unknown check '" + name + "'");
        }
    }
    return checks;
}

bool check_selected(const std::vector<std::string>& checks, const std::string& name) {
    return std::find(checks.begin(), checks.end(), name) != checks.end();
}

void print_verdict(std::ostream& out, const std::string& scenario, const Verdict& v) {
    out << "[" << scenario << "] " << v.check << ": ";
    if (!v.theory_applicable) {
        out << (v.passed ? "PASS" : "FAIL") << " (theory-not-applicable, margin="
            << short_real(v.margin) << ")\n";
    } else {
        out << (v.passed ? "PASS" : "FAIL") << " (margin=" << short_real(v.margin) << ")\n";
    }
}

// Custom members go through the verdict-valued validator first so failures
// come with a witness instead of an exception message.
bool report_family_problems(const Scenario& s, std::ostream& err) {
    if (s.family.kind != FamilyKind::custom) return false;
    std::vector<Multiplier> raw;
    raw.reserve(s.family.custom_members.size());
    for (const auto& v : s.family.custom_members) {
        if (v.size() != s.n) {
            err << "scenario '" << s.name << "': custom member length " << v.size()
                << " does not match n=" << s.n << "\n";
            return true;
        }
        raw.push_back(Multiplier::unchecked(v));
    }
    const auto verdict = validate_ordered(MultiplierFamily::unchecked(std::move(raw)));
    if (verdict.valid) return false;
    const auto& w = *verdict.violation;
    err << "scenario '" << s.name << "': invalid family: " << w.what << " (members " << w.member_a
        << " and " << w.member_b << ", coordinate " << w.coordinate << ")\n";
    return true;
}

} // namespace

int cmd_validate(const Options& options, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        config = load_config(options.config_path);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    bool all_valid = true;
    out << "scenario,kind,members,k_lower,k_upper,prior_residual,ordered\n";
    for (const Scenario& s : config.scenarios) {
        if (report_family_problems(s, err)) {
            all_valid = false;
            continue;
        }
        MultiplierFamily family = [&]() -> MultiplierFamily {
            try {
                return make_family(s.family, s.n);
            } catch (const std::invalid_argument& e) {
                err << "scenario '" << s.name << "': invalid family: " << e.what() << "\n";
                return MultiplierFamily::unchecked({Multiplier::unchecked({0.0})});
            }
        }();
        if (!family.validated()) {
            all_valid = false;
            continue;
        }

        const auto verdict = validate_ordered(family);
        if (!verdict.valid) {
            const auto& w = *verdict.violation;
            err << "scenario '" << s.name << "': order violation: " << w.what << " (members "
                << w.member_a << " and " << w.member_b << ", coordinate " << w.coordinate
                << ")\n";
            all_valid = false;
            continue;
        }

        const PriorWeights priors = prior_weights(family, s.beta);
        const double residual = check_prior_identity(priors, family);
        const ConditionReport condition = check_condition(family);
        out << s.name << ',' << to_string(family.kind()) << ',' << family.size() << ','
            << short_real(condition.k_lower) << ',' << short_real(condition.k_upper) << ','
            << short_real(residual) << ',' << "yes" << '\n';
        if (condition.excluded_zero_member) {
            out << "# note: member " << *condition.excluded_zero_member
                << " (all zeros) excluded from the successor-norm ratio\n";
        }
        if (family.merged_members() > 0) {
            out << "# warning: merged " << family.merged_members()
                << " near-duplicate members (l1 gap < 1e-10)\n";
        }
    }
    return all_valid ? exit_ok : exit_verdict_failure;
}

int cmd_run(const Options& options, std::ostream& out, std::ostream& err) {
    RunConfig config;
    std::vector<std::string> checks;
    try {
        config = load_config(options.config_path);
        checks = resolve_checks(options, config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    const fs::path out_dir = resolve_out_dir(options, config);
    std::vector<std::string> formats = !options.formats.empty() ? options.formats : config.formats;

    try {
        fs::create_directories(out_dir);
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return exit_io_error;
    }

    RunOptions run_options;
    run_options.threads = options.threads;
    run_options.psi_c = config.psi_c;

    bool all_passed = true;
    for (Scenario s : config.scenarios) {
        if (options.seed) s.seed = *options.seed;
        RiskReport report;
        try {
            report = run_scenario(s, run_options);
        } catch (const std::invalid_argument& e) {
            err << "scenario '" << s.name << "': " << e.what() << "\n";
            return exit_verdict_failure;
        }

        if (check_selected(checks, "simplex_bounds")) {
            const auto bounds = verify_aggregation_bounds(report, config.sampled_lambdas);
            Verdict v;
            v.check = "simplex_bounds";
            v.theory_applicable = bounds.theory_applicable;
            v.passed = true;
            v.margin = std::numeric_limits<double>::infinity();
            for (const auto& c : bounds.simplex_bounds) {
                v.passed = v.passed && c.passed;
                v.margin = std::min(v.margin, c.slack);
            }
            if (bounds.simplex_bounds.empty()) v.margin = 0.0;
            report.verdicts.push_back(v);
        }

        try {
            if (std::find(formats.begin(), formats.end(), "json") != formats.end()) {
                write_file_atomic(out_dir / (s.name + ".json"), report_to_json(report).dump(2) + "\n");
            }
            if (std::find(formats.begin(), formats.end(), "csv") != formats.end()) {
                write_file_atomic(out_dir / (s.name + ".csv"), report_to_csv(report));
            }
        } catch (const fs::filesystem_error& e) {
            err << "i/o error: " << e.what() << "\n";
            return exit_io_error;
        }

        for (const auto& v : report.verdicts) {
            if (!check_selected(checks, v.check)) continue;
            if (config.verbosity > 0) print_verdict(out, s.name, v);
            if (v.theory_applicable && !v.passed) all_passed = false;
        }
    }
    return all_passed ? exit_ok : exit_verdict_failure;
}

int cmd_sweep(const Options& options, std::ostream& out, std::ostream& err) {
    RunConfig config;
    std::vector<std::string> checks;
    try {
        config = load_config(options.config_path);
        checks = resolve_checks(options, config);
        if (options.scales.empty() && config.sweep_scales.empty()) {
            throw ConfigError("sweep: no signal scales given (config 'sweep' block or --scales)");
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    const std::vector<double>& scales =
        !options.scales.empty() ? options.scales : config.sweep_scales;

    const fs::path out_dir = resolve_out_dir(options, config);
    std::vector<std::string> formats = !options.formats.empty() ? options.formats : config.formats;
    try {
        fs::create_directories(out_dir);
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return exit_io_error;
    }

    RunOptions run_options;
    run_options.threads = options.threads;
    run_options.psi_c = config.psi_c;

    bool all_passed = true;
    for (Scenario s : config.scenarios) {
        if (options.seed) s.seed = *options.seed;
        SweepTable table;
        try {
            table = remainder_sweep(s, scales, run_options);
        } catch (const std::invalid_argument& e) {
            err << "scenario '" << s.name << "': " << e.what() << "\n";
            return exit_verdict_failure;
        }

        try {
            if (std::find(formats.begin(), formats.end(), "json") != formats.end()) {
                write_file_atomic(out_dir / (s.name + "_sweep.json"),
                                  sweep_to_json(table).dump(2) + "\n");
            }
            if (std::find(formats.begin(), formats.end(), "csv") != formats.end()) {
                write_file_atomic(out_dir / (s.name + "_sweep.csv"), sweep_to_csv(table));
            }
        } catch (const fs::filesystem_error& e) {
            err << "i/o error: " << e.what() << "\n";
            return exit_io_error;
        }

        // Crossover summary: where the log-shaped envelope drops below the
        // sqrt-shaped one.
        double crossover = -1.0;
        for (const auto& row : table.rows) {
            if (row.bound_log < row.bound_sqrt_shape) {
                crossover = row.oracle_ratio;
                break;
            }
        }
        if (config.verbosity > 0) {
            if (crossover >= 0.0) {
                out << "[" << s.name << "] log envelope below sqrt envelope from oracle_ratio="
                    << short_real(crossover) << "\n";
            } else {
                out << "[" << s.name << "] log envelope stays above sqrt envelope on this sweep\n";
            }
        }

        if (check_selected(checks, "log_remainder_bound")) {
            const PsiFunction psi{config.psi_c, s.beta};
            const auto verdict = verify_log_remainder(table, psi);
            if (config.verbosity > 0) {
                out << "[" << s.name << "] log_remainder_bound: "
                    << (verdict.all_passed ? "PASS" : "FAIL")
                    << (verdict.theory_applicable ? "" : " (theory-not-applicable)")
                    << " (c_star=" << short_real(verdict.c_star) << ")\n";
            }
            if (verdict.theory_applicable && !verdict.all_passed) all_passed = false;
        }
    }
    return all_passed ? exit_ok : exit_verdict_failure;
}

} // namespace ewsmooth::cli
