#ifndef EWSMOOTH_CONFIG_HPP
#define EWSMOOTH_CONFIG_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ewsmooth/experiments.hpp"

namespace ewsmooth {

/// Config or scenario-spec problem; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Names accepted in the "checks" list and in --checks.
const std::vector<std::string>& known_checks();

/// Parsed experiment configuration. Scenario blocks are the test fixtures;
/// unknown keys anywhere are rejected.
struct RunConfig {
    std::vector<Scenario> scenarios;
    std::string output_dir;                  // empty = unset
    std::vector<std::string> formats{"csv", "json"};
    std::vector<std::string> checks;         // empty = all known checks
    int verbosity = 1;
    std::size_t sampled_lambdas = 100;
    double psi_c = 1.0;
    std::vector<double> sweep_scales;        // empty = no sweep block
};

RunConfig parse_config(const nlohmann::ordered_json& j);
RunConfig load_config(const std::string& path);

/// Scenario block <-> JSON; the JSON report's scenario echo uses the same
/// encoding, so echoes re-parse to an identical Scenario.
nlohmann::ordered_json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::ordered_json& j);

} // namespace ewsmooth

#endif
