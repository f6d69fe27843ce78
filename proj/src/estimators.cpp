#include "ewsmooth/estimators.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

#include "ewsmooth/sum.hpp"

namespace ewsmooth {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t mix_hash(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return h;
}

std::uint64_t double_bits(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    return bits;
}

} // namespace

std::uint64_t profile_input_hash(const Observation& y, const MultiplierFamily& family) {
    std::uint64_t h = family.members_hash();
    h = mix_hash(h, double_bits(y.noise_level));
    h = mix_hash(h, y.size());
    for (double v : y.values) h = mix_hash(h, double_bits(v));
    return h;
}

UreMinimizer ure_minimizer(const Observation& y, const MultiplierFamily& family) {
    if (family.empty()) throw std::invalid_argument("ure_minimizer: empty family");
    double best = ure(y, family[0]);
    std::size_t best_index = 0;
    for (std::size_t j = 1; j < family.size(); ++j) {
        const double r = ure(y, family[j]);
        if (r < best) {  // first strict minimum = smallest l1 on ties
            best = r;
            best_index = j;
        }
    }
    return {linear_estimate(y, family[best_index]), best_index};
}

WeightProfile weights_from_ure(std::vector<double> ure_values, const PriorWeights& priors,
                               double beta, double sigma, std::uint64_t input_hash) {
    if (!(beta > 0.0)) throw std::invalid_argument("exp_weights: beta must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("exp_weights: sigma must be positive");
    if (ure_values.size() != priors.weights.size()) {
        throw std::invalid_argument("exp_weights: priors do not match the family size");
    }
    const std::size_t count = ure_values.size();

    WeightProfile profile;
    profile.beta = beta;
    profile.theory_covered = beta >= 4.0;
    profile.input_hash = input_hash;

    // argmin over URE; zero-prior members still compete here.
    profile.argmin_index = 0;
    double ure_min = ure_values[0];
    for (std::size_t j = 1; j < count; ++j) {
        if (ure_values[j] < ure_min) {
            ure_min = ure_values[j];
            profile.argmin_index = j;
        }
    }

    const double scale = 2.0 * beta * sigma * sigma;
    profile.log_weights.resize(count);
    double max_log = kNegInf;
    for (std::size_t j = 0; j < count; ++j) {
        const double pi = priors.weights[j];
        // Recenter by the URE minimum before exponentiation; the shift cancels
        // in the normalization and keeps the exponent bounded.
        const double l = (pi > 0.0 ? std::log(pi) : kNegInf) - (ure_values[j] - ure_min) / scale;
        profile.log_weights[j] = l;
        if (l > max_log) max_log = l;
    }

    profile.weights.resize(count);
    CompensatedSum norm;
    for (std::size_t j = 0; j < count; ++j) {
        profile.log_weights[j] -= max_log;
        profile.weights[j] = std::exp(profile.log_weights[j]);
        norm.add(profile.weights[j]);
    }
    const double total = norm.value();
    for (double& w : profile.weights) w /= total;

    profile.ure_values = std::move(ure_values);
    return profile;
}

WeightProfile exp_weights(const Observation& y, const MultiplierFamily& family,
                          const PriorWeights& priors, double beta) {
    if (priors.family_hash != family.members_hash()) {
        throw std::invalid_argument("exp_weights: priors built from a different family");
    }
    if (priors.beta != beta) {
        throw std::invalid_argument("exp_weights: priors built with a different beta");
    }
    std::vector<double> ure_values(family.size());
    for (std::size_t j = 0; j < family.size(); ++j) ure_values[j] = ure(y, family[j]);
    return weights_from_ure(std::move(ure_values), priors, beta, y.noise_level,
                            profile_input_hash(y, family));
}

AggregateResult aggregate(const Observation& y, const MultiplierFamily& family,
                          const WeightProfile& profile) {
    if (profile.input_hash != profile_input_hash(y, family)) {
        throw std::invalid_argument("aggregate: stale weight profile for these inputs");
    }
    const std::size_t n = y.size();
    const std::size_t count = family.size();

    AggregateResult result;
    result.estimate.assign(n, 0.0);
    // Member-major accumulation; fixed order keeps it reproducible.
    for (std::size_t j = 0; j < count; ++j) {
        const double w = profile.weights[j];
        const auto& h = family[j].values();
        for (std::size_t i = 0; i < n; ++i) result.estimate[i] += w * h[i];
    }
    for (std::size_t i = 0; i < n; ++i) result.estimate[i] *= y.values[i];

    CompensatedSum wure;
    for (std::size_t j = 0; j < count; ++j) {
        wure.add(profile.weights[j] * profile.ure_values[j]);
    }
    result.weighted_ure = wure.value();
    result.divergence = aggregate_divergence(y, family, profile);
    result.profile = profile;
    return result;
}

double aggregate_divergence(const Observation& y, const MultiplierFamily& family,
                            const WeightProfile& profile) {
    if (profile.input_hash != profile_input_hash(y, family)) {
        throw std::invalid_argument("aggregate_divergence: stale weight profile for these inputs");
    }
    const std::size_t n = y.size();
    const std::size_t count = family.size();
    const double sigma = y.noise_level;
    const double inv_beta_s2 = 1.0 / (profile.beta * sigma * sigma);

    // Per coordinate: hbar = sum w h_i, a = sum w (1-h_i)^2, b = sum w h_i (1-h_i)^2.
    std::vector<double> hbar(n, 0.0), a(n, 0.0), b(n, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
        const double w = profile.weights[j];
        const auto& h = family[j].values();
        for (std::size_t i = 0; i < n; ++i) {
            const double om = 1.0 - h[i];
            hbar[i] += w * h[i];
            a[i] += w * om * om;
            b[i] += w * h[i] * om * om;
        }
    }
    CompensatedSum div;
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = y.values[i];
        div.add(hbar[i] - yi * yi * inv_beta_s2 * (b[i] - hbar[i] * a[i]));
    }
    return div.value();
}

std::size_t slack_frontier_from_ure(const std::vector<double>& ure_values,
                                    const std::vector<double>& sq_norms,
                                    std::size_t argmin_index, double beta,
                                    double sigma, double eps) {
    if (!(beta > 0.0)) throw std::invalid_argument("slack_frontier: beta must be positive");
    if (!(eps > 0.0 && eps < 1.0 / (5.0 * beta))) {
        throw std::invalid_argument("slack_frontier: eps must lie in (0, 1/(5 beta))");
    }
    if (ure_values.size() != sq_norms.size() || argmin_index >= ure_values.size()) {
        throw std::invalid_argument("slack_frontier: inconsistent inputs");
    }
    const double s2 = sigma * sigma;
    const double ure_min = ure_values[argmin_index];
    // Scan from the top of the family order; the argmin always qualifies.
    for (std::size_t j = ure_values.size(); j-- > argmin_index;) {
        const double slack = 2.0 * beta * eps * s2 * (sq_norms[j] - sq_norms[argmin_index]) +
                             2.0 * beta * s2;
        if (ure_values[j] - ure_min <= slack) return j;
    }
    return argmin_index;
}

std::size_t slack_frontier_index(const Observation& y, const MultiplierFamily& family,
                                 double beta, double eps) {
    if (family.empty()) throw std::invalid_argument("slack_frontier: empty family");
    std::vector<double> ure_values(family.size());
    std::size_t argmin = 0;
    for (std::size_t j = 0; j < family.size(); ++j) {
        ure_values[j] = ure(y, family[j]);
        if (ure_values[j] < ure_values[argmin]) argmin = j;
    }
    return slack_frontier_from_ure(ure_values, family.sq_norms(), argmin, beta,
                                   y.noise_level, eps);
}

double entropy_term(const WeightProfile& profile, const PriorWeights& priors) {
    if (profile.weights.size() != priors.weights.size()) {
        throw std::invalid_argument("entropy_term: profile and priors misaligned");
    }
    CompensatedSum acc;
    for (std::size_t j = 0; j < profile.weights.size(); ++j) {
        const double w = profile.weights[j];
        if (w <= 0.0) continue;  // 0 log(.) = 0
        acc.add(w * std::log(priors.weights[j] / w));
    }
    return acc.value();
}

double kl_divergence(const std::vector<double>& lambda, const PriorWeights& priors) {
    if (lambda.size() != priors.weights.size()) {
        throw std::invalid_argument("kl_divergence: lambda and priors misaligned");
    }
    CompensatedSum mass;
    for (double l : lambda) {
        if (!(l >= 0.0)) throw std::invalid_argument("kl_divergence: lambda has negative mass");
        mass.add(l);
    }
    if (std::abs(mass.value() - 1.0) > 1e-9) {
        throw std::invalid_argument("kl_divergence: lambda does not sum to 1");
    }
    CompensatedSum acc;
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        const double l = lambda[j];
        if (l == 0.0) continue;
        if (priors.weights[j] <= 0.0) return std::numeric_limits<double>::infinity();
        acc.add(l * std::log(l / priors.weights[j]));
    }
    return acc.value();
}

} // namespace ewsmooth
