#ifndef EWSMOOTH_MODEL_HPP
#define EWSMOOTH_MODEL_HPP

#include <cstddef>
#include <vector>

#include "ewsmooth/rng.hpp"

namespace ewsmooth {

class MultiplierFamily;

/// Unknown mean of the sequence model. Entries must be finite.
struct MeanVector {
    explicit MeanVector(std::vector<double> v);
    std::size_t size() const { return values.size(); }
    std::vector<double> values;
};

/// One data realization Y_i = mu_i + sigma * xi_i with its known noise level.
struct Observation {
    Observation(std::vector<double> v, double sigma);
    std::size_t size() const { return values.size(); }
    std::vector<double> values;
    double noise_level;
};

/// Shrinkage multiplier h: entries in [0,1], nonincreasing in the coordinate.
/// The validating constructor throws on violations; unchecked() exists so the
/// family validator can be fed deliberately broken members.
class Multiplier {
public:
    explicit Multiplier(std::vector<double> v);
    static Multiplier unchecked(std::vector<double> v);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    struct unchecked_tag {};
    Multiplier(std::vector<double> v, unchecked_tag) : values_(std::move(v)) {}
    std::vector<double> values_;
};

/// Draws Y = mu + sigma * xi with xi iid standard normal from the given
/// stream. Deterministic given the stream key.
Observation generate_observation(const MeanVector& mu, double sigma, CounterRng& rng);

/// Componentwise shrinkage h_i * Y_i.
std::vector<double> linear_estimate(const Observation& y, const Multiplier& h);

/// Exact mean-square risk of the shrinkage estimate:
/// sum (1-h_i)^2 mu_i^2 + sigma^2 sum h_i^2.
double exact_risk(const Multiplier& h, const MeanVector& mu, double sigma);

/// Unbiased risk estimate ||Y - hY||^2 + 2 sigma^2 sum h_i - sigma^2 n.
/// Can be negative.
double ure(const Observation& y, const Multiplier& h);

struct OracleRisk {
    double risk;
    std::size_t index;  // minimizing member; ties go to the smaller l1 norm
};

/// Minimum exact risk over the family, with the minimizer's index.
OracleRisk oracle_risk(const MultiplierFamily& family, const MeanVector& mu, double sigma);

} // namespace ewsmooth

#endif
