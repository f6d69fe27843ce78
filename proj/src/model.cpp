#include "ewsmooth/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ewsmooth/families.hpp"
#include "ewsmooth/sum.hpp"

namespace ewsmooth {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

} // namespace

MeanVector::MeanVector(std::vector<double> v) : values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("MeanVector: empty");
    for (double x : values) {
        if (!std::isfinite(x)) throw std::invalid_argument("MeanVector: non-finite entry");
    }
}

Observation::Observation(std::vector<double> v, double sigma)
    : values(std::move(v)), noise_level(sigma) {
    if (values.empty()) throw std::invalid_argument("Observation: empty");
    if (!(sigma > 0.0)) throw std::invalid_argument("Observation: noise level must be positive");
    for (double x : values) {
        if (!std::isfinite(x)) throw std::invalid_argument("Observation: non-finite entry");
    }
}

Multiplier::Multiplier(std::vector<double> v) : values_(std::move(v)) {
    if (values_.empty()) throw std::invalid_argument("Multiplier: empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double h = values_[i];
        if (!(h >= 0.0 && h <= 1.0)) {
            throw std::invalid_argument("Multiplier: entry " + std::to_string(i) +
                                        " outside [0,1]");
        }
        if (i > 0 && values_[i] > values_[i - 1]) {
            throw std::invalid_argument("Multiplier: entries increase at coordinate " +
                                        std::to_string(i));
        }
    }
}

Multiplier Multiplier::unchecked(std::vector<double> v) {
    return Multiplier(std::move(v), unchecked_tag{});
}

Observation generate_observation(const MeanVector& mu, double sigma, CounterRng& rng) {
    if (!(sigma > 0.0)) throw std::invalid_argument("generate_observation: sigma must be positive");
    std::vector<double> y(mu.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = mu.values[i] + sigma * rng.next_normal();
    }
    return Observation(std::move(y), sigma);
}

std::vector<double> linear_estimate(const Observation& y, const Multiplier& h) {
    require_same_size(y.size(), h.size(), "linear_estimate");
    std::vector<double> out(y.size());
    const auto& hv = h.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = hv[i] * y.values[i];
    return out;
}

double exact_risk(const Multiplier& h, const MeanVector& mu, double sigma) {
    require_same_size(h.size(), mu.size(), "exact_risk");
    if (!(sigma > 0.0)) throw std::invalid_argument("exact_risk: sigma must be positive");
    const auto& hv = h.values();
    CompensatedSum acc;
    for (std::size_t i = 0; i < hv.size(); ++i) {
        const double bias = (1.0 - hv[i]) * mu.values[i];
        acc.add(bias * bias);
    }
    CompensatedSum var;
    for (double hi : hv) var.add(hi * hi);
    return acc.value() + sigma * sigma * var.value();
}

double ure(const Observation& y, const Multiplier& h) {
    require_same_size(y.size(), h.size(), "ure");
    const auto& hv = h.values();
    const double s2 = y.noise_level * y.noise_level;
    CompensatedSum resid;
    CompensatedSum trace;
    for (std::size_t i = 0; i < hv.size(); ++i) {
        const double r = (1.0 - hv[i]) * y.values[i];
        resid.add(r * r);
        trace.add(hv[i]);
    }
    return resid.value() + s2 * (2.0 * trace.value() - static_cast<double>(hv.size()));
}

OracleRisk oracle_risk(const MultiplierFamily& family, const MeanVector& mu, double sigma) {
    if (family.empty()) throw std::invalid_argument("oracle_risk: empty family");
    // Members are sorted by ascending l1 norm, so keeping the first strict
    // minimum realizes the smaller-||h||_1 tie-break.
    double best = exact_risk(family[0], mu, sigma);
    std::size_t best_index = 0;
    for (std::size_t j = 1; j < family.size(); ++j) {
        const double r = exact_risk(family[j], mu, sigma);
        if (r < best) {
            best = r;
            best_index = j;
        }
    }
    return {best, best_index};
}

} // namespace ewsmooth
