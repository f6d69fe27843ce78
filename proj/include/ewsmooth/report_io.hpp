#ifndef EWSMOOTH_REPORT_IO_HPP
#define EWSMOOTH_REPORT_IO_HPP

#include <filesystem>
#include <string>

#include "json.hpp"

#include "ewsmooth/experiments.hpp"

namespace ewsmooth {

/// Scientific notation with 17 significant digits; the CSV real format.
std::string format_real(double x);

/// JSON report mirroring the risk-report fields, with the scenario echo and
/// library version.
nlohmann::ordered_json report_to_json(const RiskReport& report);

/// Single-row CSV (schema-versioned header + one data row).
std::string report_to_csv(const RiskReport& report);

nlohmann::ordered_json sweep_to_json(const SweepTable& table);

/// One row per sweep scale, ordered by oracle ratio.
std::string sweep_to_csv(const SweepTable& table);

/// Writes via a temp file in the same directory and renames into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace ewsmooth

#endif
