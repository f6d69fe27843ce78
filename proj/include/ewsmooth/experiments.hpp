#ifndef EWSMOOTH_EXPERIMENTS_HPP
#define EWSMOOTH_EXPERIMENTS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ewsmooth/estimators.hpp"
#include "ewsmooth/families.hpp"
#include "ewsmooth/model.hpp"

namespace ewsmooth {

// ---------------------------------------------------------------------------
// Scenario description
// ---------------------------------------------------------------------------

enum class MuKind { zero, constant, sobolev, analytic, sparse };

/// Mean-vector generator: sobolev(A,s) -> mu_k = A k^-s, analytic(A,c) ->
/// mu_k = A exp(-c k), sparse(A, support) -> A on the 1-based support.
struct MuSpec {
    MuKind kind = MuKind::zero;
    double amplitude = 1.0;
    double exponent = 1.0;              // sobolev s / analytic c
    std::vector<std::size_t> support;   // sparse only, 1-based

    bool operator==(const MuSpec&) const = default;
};

enum class GridSpacing { geometric, linear };

struct AlphaGridSpec {
    double min = 1e-6;
    double max = 1e2;
    std::size_t count = 50;
    GridSpacing spacing = GridSpacing::geometric;

    bool operator==(const AlphaGridSpec&) const = default;
};

struct SpectrumSpec {
    bool explicit_values = false;
    double exponent = 2.0;              // polynomial lambda_k = k^exponent
    std::vector<double> values;         // explicit list

    bool operator==(const SpectrumSpec&) const = default;
};

struct FamilySpec {
    FamilyKind kind = FamilyKind::tikhonov;
    SpectrumSpec spectrum;              // tikhonov / pinsker / landweber
    AlphaGridSpec alpha;                // tikhonov / pinsker
    std::vector<std::size_t> cut_points;  // cutoff; empty means 0..n
    double landweber_step = 0.0;
    std::vector<std::size_t> landweber_counts;
    std::vector<std::vector<double>> custom_members;

    bool operator==(const FamilySpec&) const = default;
};

/// Complete experiment description; everything downstream is a pure function
/// of this plus the run options.
struct Scenario {
    std::string name = "scenario";
    std::size_t n = 100;
    double sigma = 1.0;
    MuSpec mu;
    FamilySpec family;
    double beta = 4.0;
    std::size_t replications = 1000;
    std::uint64_t seed = 1;

    bool operator==(const Scenario&) const = default;
};

/// Materialized scenario pieces shared by the run/verify entry points.
struct ScenarioInstance {
    MeanVector mu;
    MultiplierFamily family;
    PriorWeights priors;
};

std::vector<double> make_mean_values(const MuSpec& spec, std::size_t n);
MultiplierFamily make_family(const FamilySpec& spec, std::size_t n);
ScenarioInstance instantiate(const Scenario& s);

// ---------------------------------------------------------------------------
// Remainder-correction function
// ---------------------------------------------------------------------------

/// Psi(x) = C min over eps in (0, 1/(5 beta)] of [eps x + 1/eps + exp(C/eps)].
/// Nondecreasing in x, finite at 0; the generic constant C defaults to 1.
struct PsiFunction {
    double c_constant = 1.0;
    double beta = 4.0;
};

/// Grid scan over 200 log-spaced eps values refined by golden-section search.
double evaluate_psi(const PsiFunction& psi, double x);

// ---------------------------------------------------------------------------
// Monte Carlo reports
// ---------------------------------------------------------------------------

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

struct Verdict {
    std::string check;
    bool passed = false;
    double margin = 0.0;        // slack left after the 4-SE allowance
    bool theory_applicable = true;
};

struct RiskReport {
    Scenario scenario;
    double oracle_risk = 0.0;
    std::size_t oracle_index = 0;
    MeanSe mc_risk_ew;          // ||aggregate - mu||^2
    MeanSe mc_risk_ure;         // ||plug-in at URE argmin - mu||^2
    MeanSe weighted_ure_mean;   // sum_h w_h ure_h
    MeanSe paired_gap;          // weighted_ure - loss_ew, per replication
    std::optional<MeanSe> stein_gap;  // stein statistic - loss_ew, when requested
    double remainder_ew = 0.0;  // mc_risk_ew.mean - oracle_risk
    double remainder_ure = 0.0;
    double bound_log = 0.0;     // 2 beta sigma^2 log(r/sigma^2 + Psi(r/sigma^2))
    double bound_sqrt_shape = 0.0;  // sigma^2 sqrt(1 + r/sigma^2)
    bool theory_applicable = true;  // beta >= 4
    std::vector<Verdict> verdicts;
    std::vector<std::uint64_t> replication_keys;
};

struct RunOptions {
    unsigned threads = 0;       // 0 = hardware concurrency
    double psi_c = 1.0;         // generic constant inside Psi
};

/// Paired Monte Carlo over the scenario's replication streams. Deterministic
/// given the seed, independent of the thread count.
RiskReport run_scenario(const Scenario& s, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Sweeps and bound verdicts
// ---------------------------------------------------------------------------

struct SweepRow {
    double scale = 0.0;
    double oracle_ratio = 0.0;  // r / sigma^2
    double oracle_risk = 0.0;
    MeanSe mc_risk_ew;
    MeanSe mc_risk_ure;
    double remainder_ew = 0.0;
    double remainder_ure = 0.0;
    double bound_log = 0.0;
    double bound_sqrt_shape = 0.0;
};

struct SweepTable {
    Scenario base;
    std::vector<SweepRow> rows;  // ordered by oracle_ratio
};

/// Reruns the scenario with mu scaled by each entry of signal_scales
/// (nonnegative, strictly increasing).
SweepTable remainder_sweep(const Scenario& base, const std::vector<double>& signal_scales,
                           const RunOptions& options = {});

struct BoundCheck {
    std::string name;
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;         // rhs - lhs after the 4-SE allowance
    bool theory_applicable = true;
};

/// Exponential-weighting risk against the two aggregation bounds: the best
/// member plus its prior penalty, and sampled simplex mixtures plus their KL
/// penalty. Requires replications >= 100.
struct AggregationBoundsResult {
    BoundCheck member_bound;
    std::vector<BoundCheck> simplex_bounds;
    bool all_passed = false;
    bool theory_applicable = true;
    RiskReport report;
};

AggregationBoundsResult verify_aggregation_bounds(const Scenario& s,
                                                  std::size_t sampled_lambdas,
                                                  const RunOptions& options = {});

/// Same checks against an already-computed report (avoids rerunning the
/// Monte Carlo loop).
AggregationBoundsResult verify_aggregation_bounds(const RiskReport& report,
                                                  std::size_t sampled_lambdas);

/// Paired check that the aggregate's risk stays below its weighted URE in
/// expectation. Requires replications >= 100.
struct WeightedUreBoundResult {
    BoundCheck check;
    bool theory_applicable = true;
    RiskReport report;
};

WeightedUreBoundResult verify_weighted_ure_bound(const Scenario& s,
                                                 const RunOptions& options = {});

/// Per-row check remainder_ew <= bound_log + 4 SE across a sweep, plus the
/// smallest constant c_star that would make the log-shaped envelope
/// 2 beta sigma^2 log(x + c max(1, x/log(e+x))) cover every row.
struct LogRemainderResult {
    std::vector<BoundCheck> rows;
    bool all_passed = false;
    double c_star = 0.0;
    bool theory_applicable = true;
};

LogRemainderResult verify_log_remainder(const SweepTable& sweep, const PsiFunction& psi);

/// Shape diagnostics over a sweep: the log-envelope to sqrt-envelope ratio at
/// the largest scale and the rank trend of the log-normalized remainders.
struct ShapeComparison {
    double ratio_at_largest = 0.0;      // bound_log / bound_sqrt_shape
    double spearman_rho = 0.0;          // rank corr of rem/(sigma^2 log(e+x)) vs x
    bool ratio_below_one = false;
    bool no_upward_trend = false;       // spearman_rho <= 0.5
};

ShapeComparison compare_remainder_shapes(const SweepTable& sweep);

/// Monte Carlo mean of sigma^2 ||h at the slack frontier||^2 against the
/// constant-free part of its envelope r / (1 - 5 beta eps); records the
/// constant that would make the full envelope tight.
struct SlackFrontierDiagnostic {
    MeanSe mean_sq_norm;        // sigma^2 ||h_frontier||^2
    double oracle_term = 0.0;   // r / (1 - 5 beta eps)
    double empirical_c = 0.0;
};

SlackFrontierDiagnostic diagnose_slack_frontier(const Scenario& s, double eps,
                                                const RunOptions& options = {});

/// Spearman rank correlation with average ranks on ties.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

} // namespace ewsmooth

#endif
