#ifndef EWSMOOTH_FAMILIES_HPP
#define EWSMOOTH_FAMILIES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ewsmooth/model.hpp"

namespace ewsmooth {

/// Eigenvalue ladder a multiplier family is built from, sorted ascending.
struct Spectrum {
    Spectrum(std::vector<double> eigenvalues, std::string tag);

    /// lambda_k = k^exponent for k = 1..n (spline-like spectra use 2 and 4).
    static Spectrum polynomial(std::size_t n, double exponent);

    std::size_t size() const { return eigenvalues.size(); }

    std::vector<double> eigenvalues;
    std::string generator_tag;
};

enum class FamilyKind { tikhonov, pinsker, cutoff, landweber, custom };

const char* to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& s);

/// A finite set of multipliers, totally ordered componentwise and sorted
/// ascending. Construction through from_members() or the build_* functions
/// validates the order, rejects duplicates, and merges members whose l1 gap
/// falls below merge_gap (they would get zero prior weight and -inf
/// log-weights downstream).
class MultiplierFamily {
public:
    static constexpr double merge_gap = 1e-10;

    static MultiplierFamily from_members(std::vector<Multiplier> members,
                                         FamilyKind kind = FamilyKind::custom,
                                         std::optional<Spectrum> spectrum = std::nullopt,
                                         std::vector<double> alpha_grid = {});

    /// Skips validation; validate_ordered() reports what is wrong.
    static MultiplierFamily unchecked(std::vector<Multiplier> members,
                                      FamilyKind kind = FamilyKind::custom);

    const std::vector<Multiplier>& members() const { return members_; }
    const Multiplier& operator[](std::size_t j) const { return members_[j]; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    /// Cached l1 norms ||h||_1 per member, ascending for a valid family.
    const std::vector<double>& l1_norms() const { return l1_norms_; }
    /// Cached squared l2 norms ||h||^2 per member.
    const std::vector<double>& sq_norms() const { return sq_norms_; }

    bool validated() const { return validated_; }
    /// Number of members dropped because their l1 gap was below merge_gap.
    std::size_t merged_members() const { return merged_; }

    FamilyKind kind() const { return kind_; }
    const std::optional<Spectrum>& spectrum() const { return spectrum_; }
    /// Smoothing parameters aligned with members() (heavier smoothing first);
    /// empty for families not built from a grid.
    const std::vector<double>& alpha_grid() const { return alpha_grid_; }

    /// Fingerprint of the member vectors; used to detect stale companions.
    std::uint64_t members_hash() const { return hash_; }

private:
    MultiplierFamily() = default;
    void compute_caches();

    std::vector<Multiplier> members_;
    std::vector<double> l1_norms_;
    std::vector<double> sq_norms_;
    std::optional<Spectrum> spectrum_;
    std::vector<double> alpha_grid_;
    FamilyKind kind_ = FamilyKind::custom;
    bool validated_ = false;
    std::size_t merged_ = 0;
    std::uint64_t hash_ = 0;
};

/// First violation found when checking the ordered-multiplier rules.
struct OrderViolation {
    std::size_t member_a = 0;
    std::size_t member_b = 0;   // equal to member_a for single-member violations
    std::size_t coordinate = 0;
    std::string what;
};

struct FamilyValidation {
    bool valid = true;
    std::optional<OrderViolation> violation;
};

/// Checks every member for range [0,1] and within-member monotonicity, and
/// every consecutive pair for componentwise order and distinctness.
FamilyValidation validate_ordered(const MultiplierFamily& family);

/// h_k = 1 / (1 + alpha lambda_k); one member per alpha, sorted so larger
/// alpha (heavier smoothing) comes first.
MultiplierFamily build_tikhonov(const Spectrum& spectrum, std::vector<double> alpha_grid);

/// h_k = max(1 - alpha lambda_k, 0).
MultiplierFamily build_pinsker(const Spectrum& spectrum, std::vector<double> alpha_grid);

/// Projection onto the first m coordinates for each cut point m in [0, n].
MultiplierFamily build_cutoff(std::size_t n, std::vector<std::size_t> cut_points);

/// h = 1 - (1 - step * lambda)^m per iteration count m. The filter grows with
/// lambda, so eigenvalues enter the coordinates in descending order to keep
/// multipliers nonincreasing. Requires step * max(lambda) <= 1.
MultiplierFamily build_landweber(const Spectrum& spectrum, double step,
                                 std::vector<std::size_t> iteration_counts);

/// Prior weights pi_h = 1 - exp(-(||h+||_1 - ||h||_1) / beta) over the family
/// order, with pi = 1 for the top member.
struct PriorWeights {
    std::vector<double> weights;
    double beta = 0.0;
    std::uint64_t family_hash = 0;
};

PriorWeights prior_weights(const MultiplierFamily& family, double beta);

/// Max over members h of the relative residual of the telescoping identity
///   sum_{g >= h} pi_g exp(-||g||_1 / beta) = exp(-||h||_1 / beta),
/// evaluated with the common factor exp(-||h||_1 / beta) pulled out.
double check_prior_identity(const PriorWeights& priors, const MultiplierFamily& family);

/// Empirical regularity constants of the family:
///   k_lower = min over ordered pairs h > g of sum(h_i^2 - g_i^2) / (||h||_1 - ||g||_1)
///   k_upper = max over members of ||h+||^2 / ||h||^2 (top member excluded).
/// Members with ||h||^2 = 0 cannot enter the k_upper ratio and are recorded
/// as excluded instead.
struct ConditionReport {
    double k_lower = 0.0;
    double k_upper = 0.0;
    bool lower_positive = false;
    bool upper_finite = false;
    std::optional<std::pair<std::size_t, std::size_t>> k_lower_pair;
    std::optional<std::size_t> k_upper_index;
    std::optional<std::size_t> excluded_zero_member;
    bool satisfied() const { return lower_positive && upper_finite; }
};

/// Consecutive-pair scan; exact for k_lower because any pair ratio is a
/// mediant of the consecutive ratios between its endpoints.
ConditionReport check_condition(const MultiplierFamily& family);

/// Brute-force scan over all ordered pairs; cross-check for small families.
ConditionReport check_condition_all_pairs(const MultiplierFamily& family);

} // namespace ewsmooth

#endif
