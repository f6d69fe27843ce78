#include "ewsmooth/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ewsmooth/parallel.hpp"
#include "ewsmooth/sum.hpp"

namespace ewsmooth {

namespace {

constexpr std::uint64_t kPurposeLambda = 0x6C616D6264ULL;   // simplex sampling stream

MeanSe mean_se(std::span<const double> xs) {
    const double count = static_cast<double>(xs.size());
    const double mean = compensated_sum(xs) / count;
    if (xs.size() < 2) return {mean, 0.0};
    CompensatedSum ss;
    for (double x : xs) {
        const double d = x - mean;
        ss.add(d * d);
    }
    const double var = ss.value() / (count - 1.0);
    return {mean, std::sqrt(var / count)};
}

void require_bound_check_replications(const Scenario& s) {
    if (s.replications < 100) {
        throw std::invalid_argument(
            "bound checks need at least 100 replications for meaningful standard errors");
    }
}

double log_envelope(double oracle, double sigma, double beta, const PsiFunction& psi) {
    const double x = oracle / (sigma * sigma);
    return 2.0 * beta * sigma * sigma * std::log(x + evaluate_psi(psi, x));
}

} // namespace

// ---------------------------------------------------------------------------
// Scenario materialization
// ---------------------------------------------------------------------------

std::vector<double> make_mean_values(const MuSpec& spec, std::size_t n) {
    if (n == 0) throw std::invalid_argument("scenario dimension must be positive");
    std::vector<double> mu(n, 0.0);
    switch (spec.kind) {
        case MuKind::zero:
            break;
        case MuKind::constant:
            std::fill(mu.begin(), mu.end(), spec.amplitude);
            break;
        case MuKind::sobolev:
            for (std::size_t k = 0; k < n; ++k) {
                mu[k] = spec.amplitude * std::pow(static_cast<double>(k + 1), -spec.exponent);
            }
            break;
        case MuKind::analytic:
            for (std::size_t k = 0; k < n; ++k) {
                mu[k] = spec.amplitude * std::exp(-spec.exponent * static_cast<double>(k + 1));
            }
            break;
        case MuKind::sparse:
            for (std::size_t idx : spec.support) {
                if (idx < 1 || idx > n) {
                    throw std::invalid_argument("sparse mean: support index out of range");
                }
                mu[idx - 1] = spec.amplitude;
            }
            break;
    }
    return mu;
}

namespace {

Spectrum make_spectrum(const SpectrumSpec& spec, std::size_t n) {
    if (spec.explicit_values) {
        if (spec.values.size() != n) {
            throw std::invalid_argument("explicit spectrum length does not match n");
        }
        return Spectrum(spec.values, "explicit");
    }
    return Spectrum::polynomial(n, spec.exponent);
}

std::vector<double> make_alpha_grid(const AlphaGridSpec& spec) {
    if (spec.count == 0) throw std::invalid_argument("alpha grid: count must be positive");
    if (!(spec.min > 0.0) || !(spec.max >= spec.min)) {
        throw std::invalid_argument("alpha grid: need 0 < min <= max");
    }
    std::vector<double> grid(spec.count);
    if (spec.count == 1) {
        grid[0] = spec.min;
        return grid;
    }
    for (std::size_t j = 0; j < spec.count; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(spec.count - 1);
        grid[j] = spec.spacing == GridSpacing::geometric
                      ? spec.min * std::pow(spec.max / spec.min, t)
                      : spec.min + t * (spec.max - spec.min);
    }
    return grid;
}

std::vector<std::size_t> default_cut_points(std::size_t n) {
    // Full ladder up to n; decimated to ~100 members for large n.
    const std::size_t step = n <= 100 ? 1 : (n + 99) / 100;
    std::vector<std::size_t> cuts;
    for (std::size_t m = 0; m <= n; m += step) cuts.push_back(m);
    if (cuts.back() != n) cuts.push_back(n);
    return cuts;
}

} // namespace

MultiplierFamily make_family(const FamilySpec& spec, std::size_t n) {
    switch (spec.kind) {
        case FamilyKind::tikhonov:
            return build_tikhonov(make_spectrum(spec.spectrum, n), make_alpha_grid(spec.alpha));
        case FamilyKind::pinsker:
            return build_pinsker(make_spectrum(spec.spectrum, n), make_alpha_grid(spec.alpha));
        case FamilyKind::cutoff:
            return build_cutoff(n, spec.cut_points.empty() ? default_cut_points(n)
                                                           : spec.cut_points);
        case FamilyKind::landweber:
            return build_landweber(make_spectrum(spec.spectrum, n), spec.landweber_step,
                                   spec.landweber_counts);
        case FamilyKind::custom: {
            if (spec.custom_members.empty()) {
                throw std::invalid_argument("custom family: no members given");
            }
            std::vector<Multiplier> members;
            members.reserve(spec.custom_members.size());
            for (const auto& v : spec.custom_members) {
                if (v.size() != n) {
                    throw std::invalid_argument("custom family: member length does not match n");
                }
                members.emplace_back(v);
            }
            return MultiplierFamily::from_members(std::move(members));
        }
    }
    throw std::invalid_argument("unknown family kind");
}

ScenarioInstance instantiate(const Scenario& s) {
    if (!(s.sigma > 0.0)) throw std::invalid_argument("scenario: sigma must be positive");
    if (!(s.beta > 0.0)) throw std::invalid_argument("scenario: beta must be positive");
    MeanVector mu(make_mean_values(s.mu, s.n));
    MultiplierFamily family = make_family(s.family, s.n);
    PriorWeights priors = prior_weights(family, s.beta);
    return {std::move(mu), std::move(family), std::move(priors)};
}

// ---------------------------------------------------------------------------
// Psi
// ---------------------------------------------------------------------------

double evaluate_psi(const PsiFunction& psi, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("evaluate_psi: x must be nonnegative");
    const double c = psi.c_constant;
    const double cap = 1.0 / (5.0 * psi.beta);
    const auto objective = [&](double eps) {
        return eps * x + 1.0 / eps + std::exp(c / eps);
    };

    // Coarse log-spaced scan, then golden-section refinement of the bracket.
    constexpr int grid_points = 200;
    const double lo = cap * 1e-8;
    double best_eps = cap;
    double best = objective(cap);
    for (int j = 0; j < grid_points; ++j) {
        const double t = static_cast<double>(j) / (grid_points - 1);
        const double eps = lo * std::pow(cap / lo, t);
        const double f = objective(eps);
        if (f < best) {
            best = f;
            best_eps = eps;
        }
    }
    const double ratio = std::pow(cap / lo, 1.0 / (grid_points - 1));
    double a = std::max(lo, best_eps / ratio);
    double b = std::min(cap, best_eps * ratio);
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int it = 0; it < 90; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        }
    }
    best = std::min({best, f1, f2, objective(cap)});
    return c * best;
}

// ---------------------------------------------------------------------------
// Monte Carlo core
// ---------------------------------------------------------------------------

RiskReport run_scenario(const Scenario& s, const RunOptions& options) {
    if (s.replications < 2) throw std::invalid_argument("run_scenario: need at least 2 replications");
    ScenarioInstance inst = instantiate(s);
    const auto validation = validate_ordered(inst.family);
    if (!validation.valid) {
        throw std::invalid_argument("run_scenario: family failed validation: " +
                                    validation.violation->what);
    }

    const std::size_t reps = s.replications;
    const double sigma = s.sigma;
    const double s2 = sigma * sigma;
    std::vector<double> loss_ew(reps), loss_ure(reps), wure(reps), stein(reps);
    std::vector<std::uint64_t> keys(reps);

    parallel_for(reps, options.threads, [&](std::size_t r) {
        const std::uint64_t key = CounterRng::derive_key(s.seed, r);
        keys[r] = key;
        CounterRng rng(key);
        const Observation y = generate_observation(inst.mu, sigma, rng);
        const WeightProfile profile = exp_weights(y, inst.family, inst.priors, s.beta);
        const AggregateResult agg = aggregate(y, inst.family, profile);

        loss_ew[r] = sq_distance(agg.estimate, inst.mu.values);
        wure[r] = agg.weighted_ure;
        stein[r] = sq_distance(agg.estimate, y.values) + 2.0 * s2 * agg.divergence -
                   s2 * static_cast<double>(s.n);

        const auto& h = inst.family[profile.argmin_index].values();
        CompensatedSum acc;
        for (std::size_t i = 0; i < s.n; ++i) {
            const double d = h[i] * y.values[i] - inst.mu.values[i];
            acc.add(d * d);
        }
        loss_ure[r] = acc.value();
    });

    RiskReport report;
    report.scenario = s;
    report.replication_keys = std::move(keys);

    const OracleRisk oracle = oracle_risk(inst.family, inst.mu, sigma);
    report.oracle_risk = oracle.risk;
    report.oracle_index = oracle.index;

    report.mc_risk_ew = mean_se(loss_ew);
    report.mc_risk_ure = mean_se(loss_ure);
    report.weighted_ure_mean = mean_se(wure);
    report.remainder_ew = report.mc_risk_ew.mean - report.oracle_risk;
    report.remainder_ure = report.mc_risk_ure.mean - report.oracle_risk;

    std::vector<double> paired(reps), stein_gap(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        paired[r] = wure[r] - loss_ew[r];
        stein_gap[r] = stein[r] - loss_ew[r];
    }
    report.paired_gap = mean_se(paired);
    report.stein_gap = mean_se(stein_gap);

    const PsiFunction psi{options.psi_c, s.beta};
    report.bound_log = log_envelope(report.oracle_risk, sigma, s.beta, psi);
    report.bound_sqrt_shape = s2 * std::sqrt(1.0 + report.oracle_risk / s2);
    report.theory_applicable = s.beta >= 4.0;

    // Core verdicts; the CLI appends sampled-simplex checks when selected.
    {
        Verdict v;
        v.check = "weighted_ure_bound";
        v.margin = report.paired_gap.mean + 4.0 * report.paired_gap.se;
        v.passed = v.margin >= 0.0;
        v.theory_applicable = report.theory_applicable;
        report.verdicts.push_back(v);
    }
    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < inst.family.size(); ++j) {
            const double pi = inst.priors.weights[j];
            if (pi <= 0.0) continue;
            const double value = exact_risk(inst.family[j], inst.mu, sigma) +
                                 2.0 * s2 * s.beta * std::log(1.0 / pi);
            best = std::min(best, value);
        }
        Verdict v;
        v.check = "member_prior_bound";
        v.margin = best + 4.0 * report.mc_risk_ew.se - report.mc_risk_ew.mean;
        v.passed = v.margin >= 0.0;
        v.theory_applicable = report.theory_applicable;
        report.verdicts.push_back(v);
    }
    {
        Verdict v;
        v.check = "log_remainder_bound";
        v.margin = report.bound_log + 4.0 * report.mc_risk_ew.se - report.remainder_ew;
        v.passed = v.margin >= 0.0;
        v.theory_applicable = report.theory_applicable;
        report.verdicts.push_back(v);
    }
    {
        Verdict v;
        v.check = "stein_identity";
        v.margin = 4.0 * report.stein_gap->se - std::abs(report.stein_gap->mean);
        v.passed = v.margin >= 0.0;
        v.theory_applicable = true;
        report.verdicts.push_back(v);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

SweepTable remainder_sweep(const Scenario& base, const std::vector<double>& signal_scales,
                           const RunOptions& options) {
    if (signal_scales.empty()) throw std::invalid_argument("remainder_sweep: no scales");
    for (std::size_t j = 0; j < signal_scales.size(); ++j) {
        if (!(signal_scales[j] >= 0.0)) {
            throw std::invalid_argument("remainder_sweep: scales must be nonnegative");
        }
        if (j > 0 && signal_scales[j] <= signal_scales[j - 1]) {
            throw std::invalid_argument("remainder_sweep: scales must be strictly increasing");
        }
    }

    SweepTable table;
    table.base = base;
    table.rows.reserve(signal_scales.size());
    for (double scale : signal_scales) {
        Scenario scaled = base;
        scaled.mu.amplitude *= scale;
        const RiskReport report = run_scenario(scaled, options);
        SweepRow row;
        row.scale = scale;
        row.oracle_risk = report.oracle_risk;
        row.oracle_ratio = report.oracle_risk / (base.sigma * base.sigma);
        row.mc_risk_ew = report.mc_risk_ew;
        row.mc_risk_ure = report.mc_risk_ure;
        row.remainder_ew = report.remainder_ew;
        row.remainder_ure = report.remainder_ure;
        row.bound_log = report.bound_log;
        row.bound_sqrt_shape = report.bound_sqrt_shape;
        table.rows.push_back(row);
    }
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) {
                         return a.oracle_ratio < b.oracle_ratio;
                     });
    return table;
}

// ---------------------------------------------------------------------------
// Bound verdicts
// ---------------------------------------------------------------------------

AggregationBoundsResult verify_aggregation_bounds(const Scenario& s,
                                                  std::size_t sampled_lambdas,
                                                  const RunOptions& options) {
    require_bound_check_replications(s);
    return verify_aggregation_bounds(run_scenario(s, options), sampled_lambdas);
}

AggregationBoundsResult verify_aggregation_bounds(const RiskReport& report,
                                                  std::size_t sampled_lambdas) {
    const Scenario& s = report.scenario;
    require_bound_check_replications(s);
    AggregationBoundsResult result;
    result.report = report;
    result.theory_applicable = result.report.theory_applicable;

    ScenarioInstance inst = instantiate(s);
    const double s2 = s.sigma * s.sigma;
    const std::size_t count = inst.family.size();

    std::vector<double> member_risks(count);
    for (std::size_t j = 0; j < count; ++j) {
        member_risks[j] = exact_risk(inst.family[j], inst.mu, s.sigma);
    }

    const double mc = result.report.mc_risk_ew.mean;
    const double allowance = 4.0 * result.report.mc_risk_ew.se;

    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < count; ++j) {
            const double pi = inst.priors.weights[j];
            if (pi <= 0.0) continue;
            best = std::min(best, member_risks[j] + 2.0 * s2 * s.beta * std::log(1.0 / pi));
        }
        result.member_bound.name = "member_prior_bound";
        result.member_bound.lhs = mc;
        result.member_bound.rhs = best + allowance;
        result.member_bound.slack = result.member_bound.rhs - result.member_bound.lhs;
        result.member_bound.passed = result.member_bound.slack >= 0.0;
        result.member_bound.theory_applicable = result.theory_applicable;
    }

    // The mixture bound is valid against a prior probability vector; the
    // telescoping priors sum above 1 and the weights are invariant to the
    // normalization, so the KL penalty uses the normalized prior.
    PriorWeights normalized = inst.priors;
    CompensatedSum prior_mass;
    for (double p : normalized.weights) prior_mass.add(p);
    for (double& p : normalized.weights) p /= prior_mass.value();

    result.simplex_bounds.reserve(sampled_lambdas);
    for (std::size_t t = 0; t < sampled_lambdas; ++t) {
        CounterRng rng(CounterRng::derive_key(s.seed, t, kPurposeLambda));
        std::vector<double> lambda(count);
        double total = 0.0;
        for (double& l : lambda) {
            l = -std::log(rng.next_uniform());
            total += l;
        }
        for (double& l : lambda) l /= total;
        // Normalization drift is harmless here; fix the largest coordinate.
        double drift = 1.0;
        for (double l : lambda) drift -= l;
        lambda[static_cast<std::size_t>(
            std::max_element(lambda.begin(), lambda.end()) - lambda.begin())] += drift;

        CompensatedSum mix;
        for (std::size_t j = 0; j < count; ++j) mix.add(lambda[j] * member_risks[j]);
        const double rhs = mix.value() + 2.0 * s2 * s.beta * kl_divergence(lambda, normalized);

        BoundCheck check;
        check.name = "simplex_bound_" + std::to_string(t);
        check.lhs = mc - allowance;
        check.rhs = rhs;
        check.slack = check.rhs - check.lhs;
        check.passed = check.slack >= 0.0;
        check.theory_applicable = result.theory_applicable;
        result.simplex_bounds.push_back(check);
    }

    result.all_passed = result.member_bound.passed;
    for (const auto& c : result.simplex_bounds) result.all_passed = result.all_passed && c.passed;
    return result;
}

WeightedUreBoundResult verify_weighted_ure_bound(const Scenario& s, const RunOptions& options) {
    require_bound_check_replications(s);
    WeightedUreBoundResult result;
    result.report = run_scenario(s, options);
    result.theory_applicable = result.report.theory_applicable;
    result.check.name = "weighted_ure_bound";
    result.check.lhs = result.report.mc_risk_ew.mean;
    result.check.rhs = result.report.weighted_ure_mean.mean + 4.0 * result.report.paired_gap.se;
    result.check.slack = result.report.paired_gap.mean + 4.0 * result.report.paired_gap.se;
    result.check.passed = result.check.slack >= 0.0;
    result.check.theory_applicable = result.theory_applicable;
    return result;
}

LogRemainderResult verify_log_remainder(const SweepTable& sweep, const PsiFunction& psi) {
    LogRemainderResult result;
    const double beta = sweep.base.beta;
    const double s2 = sweep.base.sigma * sweep.base.sigma;
    result.theory_applicable = beta >= 4.0;
    result.all_passed = true;
    result.c_star = 0.0;

    for (const SweepRow& row : sweep.rows) {
        const double bound = log_envelope(row.oracle_risk, sweep.base.sigma, beta, psi);
        BoundCheck check;
        check.name = "log_remainder@x=" + std::to_string(row.oracle_ratio);
        check.lhs = row.remainder_ew;
        check.rhs = bound + 4.0 * row.mc_risk_ew.se;
        check.slack = check.rhs - check.lhs;
        check.passed = check.slack >= 0.0;
        check.theory_applicable = result.theory_applicable;
        result.all_passed = result.all_passed && check.passed;
        result.rows.push_back(check);

        // Smallest c with remainder <= 2 beta sigma^2 log(x + c max(1, x/log(e+x))).
        const double x = row.oracle_ratio;
        const double shape = std::max(1.0, x / std::log(std::exp(1.0) + x));
        const double needed = (std::exp(row.remainder_ew / (2.0 * beta * s2)) - x) / shape;
        result.c_star = std::max(result.c_star, needed);
    }
    return result;
}

ShapeComparison compare_remainder_shapes(const SweepTable& sweep) {
    if (sweep.rows.empty()) throw std::invalid_argument("compare_remainder_shapes: empty sweep");
    ShapeComparison cmp;
    const SweepRow& top = sweep.rows.back();
    cmp.ratio_at_largest = top.bound_log / top.bound_sqrt_shape;
    cmp.ratio_below_one = cmp.ratio_at_largest < 1.0;

    const double s2 = sweep.base.sigma * sweep.base.sigma;
    std::vector<double> xs, qs;
    xs.reserve(sweep.rows.size());
    qs.reserve(sweep.rows.size());
    for (const SweepRow& row : sweep.rows) {
        xs.push_back(row.oracle_ratio);
        qs.push_back(row.remainder_ew / (s2 * std::log(std::exp(1.0) + row.oracle_ratio)));
    }
    cmp.spearman_rho = spearman_rho(xs, qs);
    cmp.no_upward_trend = cmp.spearman_rho <= 0.5;
    return cmp;
}

SlackFrontierDiagnostic diagnose_slack_frontier(const Scenario& s, double eps,
                                                const RunOptions& options) {
    if (!(eps > 0.0 && eps < 1.0 / (5.0 * s.beta))) {
        throw std::invalid_argument("diagnose_slack_frontier: eps must lie in (0, 1/(5 beta))");
    }
    ScenarioInstance inst = instantiate(s);
    const double s2 = s.sigma * s.sigma;
    const std::size_t reps = s.replications;

    std::vector<double> sq_norm_slots(reps);
    parallel_for(reps, options.threads, [&](std::size_t r) {
        CounterRng rng(CounterRng::derive_key(s.seed, r));
        const Observation y = generate_observation(inst.mu, s.sigma, rng);
        std::vector<double> ure_values(inst.family.size());
        std::size_t argmin = 0;
        for (std::size_t j = 0; j < inst.family.size(); ++j) {
            ure_values[j] = ure(y, inst.family[j]);
            if (ure_values[j] < ure_values[argmin]) argmin = j;
        }
        const std::size_t idx = slack_frontier_from_ure(ure_values, inst.family.sq_norms(),
                                                        argmin, s.beta, s.sigma, eps);
        sq_norm_slots[r] = s2 * inst.family.sq_norms()[idx];
    });

    SlackFrontierDiagnostic diag;
    diag.mean_sq_norm = mean_se(sq_norm_slots);
    const double oracle = oracle_risk(inst.family, inst.mu, s.sigma).risk;
    const double shrink = 1.0 - 5.0 * s.beta * eps;
    diag.oracle_term = oracle / shrink;
    // Constant that would make mean = oracle_term + C sigma^2 / (shrink eps);
    // negative means the oracle term alone already covers the mean.
    diag.empirical_c = (diag.mean_sq_norm.mean - diag.oracle_term) * shrink * eps / s2;
    return diag;
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("spearman_rho: need two sequences of equal length >= 2");
    }
    const auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> rank(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
            for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
            i = j + 1;
        }
        return rank;
    };
    const std::vector<double> rx = ranks(x);
    const std::vector<double> ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace ewsmooth
