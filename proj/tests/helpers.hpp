#ifndef EWSMOOTH_TEST_HELPERS_HPP
#define EWSMOOTH_TEST_HELPERS_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ewsmooth/families.hpp"
#include "ewsmooth/model.hpp"
#include "ewsmooth/rng.hpp"

// Independent oracles: plain-loop reimplementations of the formulas, kept
// free of the library's accumulation and scan code paths.
namespace oracle {

inline double risk(const std::vector<double>& h, const std::vector<double>& mu, double sigma) {
    double bias = 0.0, var = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        bias += (1.0 - h[i]) * mu[i] * (1.0 - h[i]) * mu[i];
        var += h[i] * h[i];
    }
    return bias + sigma * sigma * var;
}

inline double ure(const std::vector<double>& y, const std::vector<double>& h, double sigma) {
    double resid = 0.0, trace = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        resid += (y[i] - h[i] * y[i]) * (y[i] - h[i] * y[i]);
        trace += h[i];
    }
    return resid + 2.0 * sigma * sigma * trace - sigma * sigma * static_cast<double>(y.size());
}

// Exhaustive scans with first-strict-minimum tie-breaking (members are sorted
// ascending in l1, so this matches the smaller-norm rule).
inline std::size_t risk_scan(const ewsmooth::MultiplierFamily& family,
                             const std::vector<double>& mu, double sigma) {
    std::size_t best = 0;
    double best_value = risk(family[0].values(), mu, sigma);
    for (std::size_t j = 1; j < family.size(); ++j) {
        const double v = risk(family[j].values(), mu, sigma);
        if (v < best_value) {
            best_value = v;
            best = j;
        }
    }
    return best;
}

inline std::size_t ure_scan(const ewsmooth::MultiplierFamily& family,
                            const std::vector<double>& y, double sigma) {
    std::size_t best = 0;
    double best_value = ure(y, family[0].values(), sigma);
    for (std::size_t j = 1; j < family.size(); ++j) {
        const double v = ure(y, family[j].values(), sigma);
        if (v < best_value) {
            best_value = v;
            best = j;
        }
    }
    return best;
}

} // namespace oracle

namespace testgen {

// Ordered family h_j = base^(p_j) with base nonincreasing in (0,1] and
// exponents p descending; componentwise monotone in both directions.
inline ewsmooth::MultiplierFamily power_family(std::size_t n, std::size_t count,
                                               std::uint64_t seed) {
    ewsmooth::CounterRng rng(ewsmooth::CounterRng::derive_key(seed, 0xFA));
    std::vector<double> base(n);
    double level = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        level *= 0.85 + 0.149 * rng.next_uniform();  // stays in (0,1)
        base[i] = level;
    }
    std::vector<double> exponents(count);
    double p = 0.05 + 0.2 * rng.next_uniform();
    for (std::size_t j = 0; j < count; ++j) {
        exponents[j] = p;
        p *= 1.4 + rng.next_uniform();
    }
    std::vector<ewsmooth::Multiplier> members;
    for (std::size_t j = count; j-- > 0;) {  // ascending members
        std::vector<double> h(n);
        for (std::size_t i = 0; i < n; ++i) h[i] = std::pow(base[i], exponents[j]);
        members.emplace_back(std::move(h));
    }
    return ewsmooth::MultiplierFamily::from_members(std::move(members));
}

inline std::vector<double> random_vector(std::size_t n, double scale, std::uint64_t seed) {
    ewsmooth::CounterRng rng(ewsmooth::CounterRng::derive_key(seed, 0xDA));
    std::vector<double> v(n);
    for (double& x : v) x = scale * rng.next_normal();
    return v;
}

} // namespace testgen

#endif
