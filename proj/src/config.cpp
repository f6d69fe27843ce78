#include "ewsmooth/config.hpp"

#include <algorithm>
#include <fstream>

namespace ewsmooth {

using ordered_json = nlohmann::ordered_json;

namespace {

void check_keys(const ordered_json& obj, const std::vector<std::string>& allowed,
                const std::string& context) {
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw ConfigError(context + ": unknown key '" + item.key() + "'");
        }
    }
}

const ordered_json& require_field(const ordered_json& obj, const std::string& key,
                                  const std::string& context) {
    if (!obj.contains(key)) {
        throw ConfigError(context + ": missing required field '" + key + "'");
    }
    return obj.at(key);
}

double get_real(const ordered_json& obj, const std::string& key, const std::string& context) {
    const auto& v = require_field(obj, key, context);
    if (!v.is_number()) throw ConfigError(context + ": field '" + key + "' must be a number");
    return v.get<double>();
}

double get_real_or(const ordered_json& obj, const std::string& key, double fallback,
                   const std::string& context) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(context + ": field '" + key + "' must be a number");
    return v.get<double>();
}

std::uint64_t get_uint(const ordered_json& obj, const std::string& key,
                       const std::string& context) {
    const auto& v = require_field(obj, key, context);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ConfigError(context + ": field '" + key + "' must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

std::string get_string(const ordered_json& obj, const std::string& key,
                       const std::string& context) {
    const auto& v = require_field(obj, key, context);
    if (!v.is_string()) throw ConfigError(context + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> get_real_array(const ordered_json& v, const std::string& context) {
    if (!v.is_array()) throw ConfigError(context + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(context + ": expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<std::size_t> get_index_array(const ordered_json& v, const std::string& context) {
    if (!v.is_array()) throw ConfigError(context + ": expected an array of nonnegative integers");
    std::vector<std::size_t> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<long long>() >= 0)) {
            throw ConfigError(context + ": expected an array of nonnegative integers");
        }
        out.push_back(e.get<std::size_t>());
    }
    return out;
}

MuSpec parse_mu(const ordered_json& j, const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": 'mu' must be an object");
    const std::string kind = get_string(j, "kind", context);
    MuSpec mu;
    if (kind == "zero") {
        check_keys(j, {"kind"}, context);
        mu.kind = MuKind::zero;
    } else if (kind == "constant") {
        check_keys(j, {"kind", "amplitude"}, context);
        mu.kind = MuKind::constant;
        mu.amplitude = get_real(j, "amplitude", context);
    } else if (kind == "sobolev") {
        check_keys(j, {"kind", "amplitude", "exponent"}, context);
        mu.kind = MuKind::sobolev;
        mu.amplitude = get_real(j, "amplitude", context);
        mu.exponent = get_real(j, "exponent", context);
    } else if (kind == "analytic") {
        check_keys(j, {"kind", "amplitude", "decay"}, context);
        mu.kind = MuKind::analytic;
        mu.amplitude = get_real(j, "amplitude", context);
        mu.exponent = get_real(j, "decay", context);
    } else if (kind == "sparse") {
        check_keys(j, {"kind", "amplitude", "support"}, context);
        mu.kind = MuKind::sparse;
        mu.amplitude = get_real(j, "amplitude", context);
        mu.support = get_index_array(require_field(j, "support", context), context + ".support");
    } else {
        throw ConfigError(context + ": unknown mu kind '" + kind + "'");
    }
    return mu;
}

ordered_json mu_to_json(const MuSpec& mu) {
    ordered_json j;
    switch (mu.kind) {
        case MuKind::zero:
            j["kind"] = "zero";
            break;
        case MuKind::constant:
            j["kind"] = "constant";
            j["amplitude"] = mu.amplitude;
            break;
        case MuKind::sobolev:
            j["kind"] = "sobolev";
            j["amplitude"] = mu.amplitude;
            j["exponent"] = mu.exponent;
            break;
        case MuKind::analytic:
            j["kind"] = "analytic";
            j["amplitude"] = mu.amplitude;
            j["decay"] = mu.exponent;
            break;
        case MuKind::sparse:
            j["kind"] = "sparse";
            j["amplitude"] = mu.amplitude;
            j["support"] = mu.support;
            break;
    }
    return j;
}

SpectrumSpec parse_spectrum(const ordered_json& j, const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": 'spectrum' must be an object");
    const std::string kind = get_string(j, "kind", context);
    SpectrumSpec spec;
    if (kind == "polynomial") {
        check_keys(j, {"kind", "exponent"}, context);
        spec.explicit_values = false;
        spec.exponent = get_real(j, "exponent", context);
    } else if (kind == "explicit") {
        check_keys(j, {"kind", "values"}, context);
        spec.explicit_values = true;
        spec.values = get_real_array(require_field(j, "values", context), context + ".values");
    } else {
        throw ConfigError(context + ": unknown spectrum kind '" + kind + "'");
    }
    return spec;
}

ordered_json spectrum_to_json(const SpectrumSpec& spec) {
    ordered_json j;
    if (spec.explicit_values) {
        j["kind"] = "explicit";
        j["values"] = spec.values;
    } else {
        j["kind"] = "polynomial";
        j["exponent"] = spec.exponent;
    }
    return j;
}

AlphaGridSpec parse_alpha_grid(const ordered_json& j, const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": 'alpha_grid' must be an object");
    check_keys(j, {"min", "max", "count", "spacing"}, context);
    AlphaGridSpec grid;
    grid.min = get_real(j, "min", context);
    grid.max = get_real(j, "max", context);
    grid.count = static_cast<std::size_t>(get_uint(j, "count", context));
    const std::string spacing =
        j.contains("spacing") ? get_string(j, "spacing", context) : "geometric";
    if (spacing == "geometric") {
        grid.spacing = GridSpacing::geometric;
    } else if (spacing == "linear") {
        grid.spacing = GridSpacing::linear;
    } else {
        throw ConfigError(context + ": spacing must be 'geometric' or 'linear'");
    }
    return grid;
}

ordered_json alpha_grid_to_json(const AlphaGridSpec& grid) {
    ordered_json j;
    j["min"] = grid.min;
    j["max"] = grid.max;
    j["count"] = grid.count;
    j["spacing"] = grid.spacing == GridSpacing::geometric ? "geometric" : "linear";
    return j;
}

FamilySpec parse_family(const ordered_json& j, const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": 'family' must be an object");
    const std::string kind = get_string(j, "kind", context);
    FamilySpec spec;
    if (kind == "tikhonov" || kind == "pinsker") {
        check_keys(j, {"kind", "spectrum", "alpha_grid"}, context);
        spec.kind = kind == "tikhonov" ? FamilyKind::tikhonov : FamilyKind::pinsker;
        spec.spectrum = parse_spectrum(require_field(j, "spectrum", context),
                                       context + ".spectrum");
        spec.alpha = parse_alpha_grid(require_field(j, "alpha_grid", context),
                                      context + ".alpha_grid");
    } else if (kind == "cutoff") {
        check_keys(j, {"kind", "cut_points"}, context);
        spec.kind = FamilyKind::cutoff;
        if (j.contains("cut_points")) {
            spec.cut_points =
                get_index_array(j.at("cut_points"), context + ".cut_points");
        }
    } else if (kind == "landweber") {
        check_keys(j, {"kind", "spectrum", "step", "iteration_counts"}, context);
        spec.kind = FamilyKind::landweber;
        spec.spectrum = parse_spectrum(require_field(j, "spectrum", context),
                                       context + ".spectrum");
        spec.landweber_step = get_real(j, "step", context);
        spec.landweber_counts = get_index_array(require_field(j, "iteration_counts", context),
                                                context + ".iteration_counts");
    } else if (kind == "custom") {
        check_keys(j, {"kind", "members"}, context);
        spec.kind = FamilyKind::custom;
        const auto& members = require_field(j, "members", context);
        if (!members.is_array() || members.empty()) {
            throw ConfigError(context + ": 'members' must be a non-empty array of vectors");
        }
        for (const auto& m : members) {
            spec.custom_members.push_back(get_real_array(m, context + ".members"));
        }
    } else {
        throw ConfigError(context + ": unknown family kind '" + kind + "'");
    }
    return spec;
}

ordered_json family_to_json(const FamilySpec& spec) {
    ordered_json j;
    switch (spec.kind) {
        case FamilyKind::tikhonov:
        case FamilyKind::pinsker:
            j["kind"] = to_string(spec.kind);
            j["spectrum"] = spectrum_to_json(spec.spectrum);
            j["alpha_grid"] = alpha_grid_to_json(spec.alpha);
            break;
        case FamilyKind::cutoff:
            j["kind"] = "cutoff";
            if (!spec.cut_points.empty()) j["cut_points"] = spec.cut_points;
            break;
        case FamilyKind::landweber:
            j["kind"] = "landweber";
            j["spectrum"] = spectrum_to_json(spec.spectrum);
            j["step"] = spec.landweber_step;
            j["iteration_counts"] = spec.landweber_counts;
            break;
        case FamilyKind::custom:
            j["kind"] = "custom";
            j["members"] = spec.custom_members;
            break;
    }
    return j;
}

bool valid_scenario_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

} // namespace

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> checks = {
        "weighted_ure_bound", "member_prior_bound", "simplex_bounds",
        "log_remainder_bound", "stein_identity",
    };
    return checks;
}

Scenario scenario_from_json(const ordered_json& j) {
    if (!j.is_object()) throw ConfigError("scenario: expected an object");
    const std::string name =
        j.contains("name") ? get_string(j, "name", "scenario") : std::string("scenario");
    const std::string context = "scenario '" + name + "'";
    check_keys(j, {"name", "n", "sigma", "beta", "replications", "seed", "mu", "family"},
               context);
    if (!valid_scenario_name(name)) {
        throw ConfigError(context + ": name must match [A-Za-z0-9_-]+");
    }

    Scenario s;
    s.name = name;
    s.n = static_cast<std::size_t>(get_uint(j, "n", context));
    s.sigma = get_real(j, "sigma", context);
    s.beta = get_real_or(j, "beta", 4.0, context);
    s.replications = static_cast<std::size_t>(get_uint(j, "replications", context));
    s.seed = get_uint(j, "seed", context);
    s.mu = parse_mu(require_field(j, "mu", context), context + ".mu");
    s.family = parse_family(require_field(j, "family", context), context + ".family");

    if (s.n == 0) throw ConfigError(context + ": n must be positive");
    if (!(s.sigma > 0.0)) throw ConfigError(context + ": sigma must be positive");
    if (!(s.beta > 0.0)) throw ConfigError(context + ": beta must be positive");
    if (s.replications < 2) throw ConfigError(context + ": replications must be at least 2");
    return s;
}

ordered_json scenario_to_json(const Scenario& s) {
    ordered_json j;
    j["name"] = s.name;
    j["n"] = s.n;
    j["sigma"] = s.sigma;
    j["beta"] = s.beta;
    j["replications"] = s.replications;
    j["seed"] = s.seed;
    j["mu"] = mu_to_json(s.mu);
    j["family"] = family_to_json(s.family);
    return j;
}

RunConfig parse_config(const ordered_json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a top-level object");
    check_keys(j,
               {"scenarios", "output_dir", "formats", "checks", "verbosity",
                "sampled_lambdas", "psi_c", "sweep"},
               "config");

    RunConfig config;
    const auto& scenarios = require_field(j, "scenarios", "config");
    if (!scenarios.is_array() || scenarios.empty()) {
        throw ConfigError("config: 'scenarios' must be a non-empty array");
    }
    for (const auto& block : scenarios) config.scenarios.push_back(scenario_from_json(block));

    for (std::size_t a = 0; a < config.scenarios.size(); ++a) {
        for (std::size_t b = a + 1; b < config.scenarios.size(); ++b) {
            if (config.scenarios[a].name == config.scenarios[b].name) {
                throw ConfigError("config: duplicate scenario name '" +
                                  config.scenarios[a].name + "'");
            }
        }
    }

    if (j.contains("output_dir")) config.output_dir = get_string(j, "output_dir", "config");
    if (j.contains("formats")) {
        config.formats.clear();
        for (const auto& f : j.at("formats")) {
            const std::string fmt = f.get<std::string>();
            if (fmt != "csv" && fmt != "json") {
                throw ConfigError("config: unknown format '" + fmt + "'");
            }
            config.formats.push_back(fmt);
        }
        if (config.formats.empty()) throw ConfigError("config: 'formats' must not be empty");
    }
    if (j.contains("checks")) {
        for (const auto& c : j.at("checks")) {
            const std::string name = c.get<std::string>();
            if (std::find(known_checks().begin(), known_checks().end(), name) ==
                known_checks().end()) {
                throw ConfigError("config: unknown check '" + name + "'");
            }
            config.checks.push_back(name);
        }
    }
    if (j.contains("verbosity")) {
        config.verbosity = static_cast<int>(get_uint(j, "verbosity", "config"));
    }
    if (j.contains("sampled_lambdas")) {
        config.sampled_lambdas =
            static_cast<std::size_t>(get_uint(j, "sampled_lambdas", "config"));
    }
    config.psi_c = get_real_or(j, "psi_c", 1.0, "config");
    if (j.contains("sweep")) {
        const auto& sweep = j.at("sweep");
        if (!sweep.is_object()) throw ConfigError("config.sweep: expected an object");
        check_keys(sweep, {"signal_scales"}, "config.sweep");
        config.sweep_scales = get_real_array(require_field(sweep, "signal_scales", "config.sweep"),
                                             "config.sweep.signal_scales");
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

} // namespace ewsmooth
