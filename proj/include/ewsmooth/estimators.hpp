#ifndef EWSMOOTH_ESTIMATORS_HPP
#define EWSMOOTH_ESTIMATORS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ewsmooth/families.hpp"
#include "ewsmooth/model.hpp"

namespace ewsmooth {

/// Posterior exponential weights for one realization. Weights are computed in
/// the log domain with a max shift, so URE spreads of ~1e8 sigma^2 stay exact
/// to normalization.
struct WeightProfile {
    std::vector<double> log_weights;  // log pi_h - ure_h/(2 beta sigma^2), max-shifted
    std::vector<double> weights;      // normalized, sums to 1
    std::vector<double> ure_values;   // per member
    double beta = 0.0;
    std::size_t argmin_index = 0;     // URE argmin; ties to the smaller l1 norm
    std::uint64_t input_hash = 0;     // fingerprint of (Y, sigma, family)
    bool theory_covered = true;       // beta >= 4
};

struct AggregateResult {
    std::vector<double> estimate;     // sum_h w_h h_i Y_i per coordinate
    WeightProfile profile;            // the weights the aggregate was built from
    double weighted_ure = 0.0;        // sum_h w_h ure_h
    double divergence = 0.0;          // sum_i d estimate_i / d Y_i, analytic
};

struct UreMinimizer {
    std::vector<double> estimate;
    std::size_t index;
};

/// Plug-in estimate at the URE argmin over the family.
UreMinimizer ure_minimizer(const Observation& y, const MultiplierFamily& family);

/// Fingerprint binding a profile to the (Y, family) pair it was computed from.
std::uint64_t profile_input_hash(const Observation& y, const MultiplierFamily& family);

/// Weights proportional to pi_h exp(-ure_h / (2 beta sigma^2)). Accepts any
/// beta > 0; profiles carry theory_covered = (beta >= 4) so reports can flag
/// runs outside the covered range.
WeightProfile exp_weights(const Observation& y, const MultiplierFamily& family,
                          const PriorWeights& priors, double beta);

/// Same computation from already-known URE values; exp_weights delegates here
/// and tests can drive it with hand-set values.
WeightProfile weights_from_ure(std::vector<double> ure_values, const PriorWeights& priors,
                               double beta, double sigma, std::uint64_t input_hash = 0);

/// Convex aggregate of the member estimates under the profile's weights,
/// with its weighted URE and analytic divergence. Rejects profiles whose
/// input hash does not match (y, family).
AggregateResult aggregate(const Observation& y, const MultiplierFamily& family,
                          const WeightProfile& profile);

/// sum_i d(aggregate_i)/dY_i, differentiating through the weights:
///   d w_h/dY_i = -w_h [2(1-h_i)^2 Y_i - sum_g w_g 2(1-g_i)^2 Y_i] / (2 beta sigma^2).
/// This is the degrees-of-freedom term of the aggregate's unbiased risk
/// identity.
double aggregate_divergence(const Observation& y, const MultiplierFamily& family,
                            const WeightProfile& profile);

/// Largest member whose URE excess over the minimum stays inside the slack
/// envelope 2 beta eps sigma^2 [||h||^2 - ||h_hat||^2] + 2 beta sigma^2.
/// Never below the argmin itself. Requires eps in (0, 1/(5 beta)).
std::size_t slack_frontier_index(const Observation& y, const MultiplierFamily& family,
                                 double beta, double eps);

/// Scan from precomputed URE values and member squared norms.
std::size_t slack_frontier_from_ure(const std::vector<double>& ure_values,
                                    const std::vector<double>& sq_norms,
                                    std::size_t argmin_index, double beta,
                                    double sigma, double eps);

/// sum_h w_h log(pi_h / w_h) with the 0 log 0 = 0 convention.
double entropy_term(const WeightProfile& profile, const PriorWeights& priors);

/// Kullback-Leibler divergence sum lambda_h log(lambda_h / pi_h); +inf when
/// lambda puts mass where the prior has none. lambda must lie on the simplex.
double kl_divergence(const std::vector<double>& lambda, const PriorWeights& priors);

} // namespace ewsmooth

#endif
