#include "ewsmooth/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "ewsmooth/config.hpp"
#include "ewsmooth/version.hpp"

namespace ewsmooth {

using ordered_json = nlohmann::ordered_json;

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

namespace {

ordered_json mean_se_json(const MeanSe& m) {
    ordered_json j;
    j["mean"] = m.mean;
    j["se"] = m.se;
    return j;
}

ordered_json verdicts_json(const std::vector<Verdict>& verdicts) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : verdicts) {
        ordered_json j;
        j["check"] = v.check;
        j["passed"] = v.passed;
        j["margin"] = v.margin;
        j["theory_applicable"] = v.theory_applicable;
        arr.push_back(j);
    }
    return arr;
}

} // namespace

ordered_json report_to_json(const RiskReport& report) {
    ordered_json j;
    j["library_version"] = library_version;
    j["scenario"] = scenario_to_json(report.scenario);
    j["oracle_risk"] = report.oracle_risk;
    j["oracle_index"] = report.oracle_index;
    j["mc_risk_ew"] = mean_se_json(report.mc_risk_ew);
    j["mc_risk_ure"] = mean_se_json(report.mc_risk_ure);
    j["weighted_ure"] = mean_se_json(report.weighted_ure_mean);
    j["paired_gap"] = mean_se_json(report.paired_gap);
    if (report.stein_gap) j["stein_gap"] = mean_se_json(*report.stein_gap);
    j["remainder_ew"] = report.remainder_ew;
    j["remainder_ure"] = report.remainder_ure;
    j["bound_log"] = report.bound_log;
    j["bound_sqrt_shape"] = report.bound_sqrt_shape;
    j["theory_applicable"] = report.theory_applicable;
    j["verdicts"] = verdicts_json(report.verdicts);
    j["replication_keys"] = report.replication_keys;
    return j;
}

std::string report_to_csv(const RiskReport& report) {
    std::ostringstream out;
    out << "schema_version,name,n,sigma,beta,replications,seed,oracle_risk,oracle_index,"
           "mc_risk_ew_mean,mc_risk_ew_se,mc_risk_ure_mean,mc_risk_ure_se,"
           "weighted_ure_mean,weighted_ure_se,paired_gap_mean,paired_gap_se,"
           "remainder_ew,remainder_ure,bound_log,bound_sqrt_shape,theory_applicable,"
           "all_verdicts_passed\n";
    bool all = true;
    for (const auto& v : report.verdicts) {
        if (v.theory_applicable && !v.passed) all = false;
    }
    const Scenario& s = report.scenario;
    out << csv_schema_version << ',' << s.name << ',' << s.n << ','
        << format_real(s.sigma) << ',' << format_real(s.beta) << ',' << s.replications << ','
        << s.seed << ',' << format_real(report.oracle_risk) << ',' << report.oracle_index << ','
        << format_real(report.mc_risk_ew.mean) << ',' << format_real(report.mc_risk_ew.se) << ','
        << format_real(report.mc_risk_ure.mean) << ',' << format_real(report.mc_risk_ure.se) << ','
        << format_real(report.weighted_ure_mean.mean) << ','
        << format_real(report.weighted_ure_mean.se) << ','
        << format_real(report.paired_gap.mean) << ',' << format_real(report.paired_gap.se) << ','
        << format_real(report.remainder_ew) << ',' << format_real(report.remainder_ure) << ','
        << format_real(report.bound_log) << ',' << format_real(report.bound_sqrt_shape) << ','
        << (report.theory_applicable ? "true" : "false") << ','
        << (all ? "true" : "false") << '\n';
    return out.str();
}

ordered_json sweep_to_json(const SweepTable& table) {
    ordered_json j;
    j["library_version"] = library_version;
    j["scenario"] = scenario_to_json(table.base);
    ordered_json rows = ordered_json::array();
    for (const auto& row : table.rows) {
        ordered_json r;
        r["scale"] = row.scale;
        r["oracle_ratio"] = row.oracle_ratio;
        r["oracle_risk"] = row.oracle_risk;
        r["mc_risk_ew"] = mean_se_json(row.mc_risk_ew);
        r["mc_risk_ure"] = mean_se_json(row.mc_risk_ure);
        r["remainder_ew"] = row.remainder_ew;
        r["remainder_ure"] = row.remainder_ure;
        r["bound_log"] = row.bound_log;
        r["bound_sqrt_shape"] = row.bound_sqrt_shape;
        rows.push_back(r);
    }
    j["rows"] = rows;
    return j;
}

std::string sweep_to_csv(const SweepTable& table) {
    std::ostringstream out;
    out << "schema_version,name,scale,oracle_ratio,oracle_risk,"
           "mc_risk_ew_mean,mc_risk_ew_se,mc_risk_ure_mean,mc_risk_ure_se,"
           "remainder_ew,remainder_ure,bound_log,bound_sqrt_shape\n";
    for (const auto& row : table.rows) {
        out << csv_schema_version << ',' << table.base.name << ','
            << format_real(row.scale) << ',' << format_real(row.oracle_ratio) << ','
            << format_real(row.oracle_risk) << ','
            << format_real(row.mc_risk_ew.mean) << ',' << format_real(row.mc_risk_ew.se) << ','
            << format_real(row.mc_risk_ure.mean) << ',' << format_real(row.mc_risk_ure.se) << ','
            << format_real(row.remainder_ew) << ',' << format_real(row.remainder_ure) << ','
            << format_real(row.bound_log) << ',' << format_real(row.bound_sqrt_shape) << '\n';
    }
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::filesystem::filesystem_error(
                "cannot open for writing", tmp,
                std::make_error_code(std::errc::permission_denied));
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::filesystem::filesystem_error(
                "write failed", tmp, std::make_error_code(std::errc::io_error));
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace ewsmooth
