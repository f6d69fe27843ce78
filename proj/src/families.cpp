#include "ewsmooth/families.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "ewsmooth/sum.hpp"

namespace ewsmooth {

namespace {

std::uint64_t fnv1a_init() { return 0xCBF29CE484222325ULL; }

void fnv1a_add(std::uint64_t& h, const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
}

void fnv1a_add_double(std::uint64_t& h, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    fnv1a_add(h, &bits, sizeof bits);
}

std::uint64_t hash_members(const std::vector<Multiplier>& members) {
    std::uint64_t h = fnv1a_init();
    const std::uint64_t count = members.size();
    fnv1a_add(h, &count, sizeof count);
    for (const auto& m : members) {
        const std::uint64_t n = m.size();
        fnv1a_add(h, &n, sizeof n);
        for (double x : m.values()) fnv1a_add_double(h, x);
    }
    return h;
}

void check_alpha_grid(const std::vector<double>& alpha) {
    if (alpha.empty()) throw std::invalid_argument("alpha grid: empty");
    bool ascending = true;
    bool descending = true;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (!(alpha[j] > 0.0)) throw std::invalid_argument("alpha grid: entries must be positive");
        if (j > 0) {
            if (alpha[j] <= alpha[j - 1]) ascending = false;
            if (alpha[j] >= alpha[j - 1]) descending = false;
        }
    }
    if (alpha.size() > 1 && !ascending && !descending) {
        throw std::invalid_argument("alpha grid: not strictly monotone");
    }
}

// Members come out sorted ascending (largest alpha = most shrinkage first).
std::vector<double> descending_alphas(std::vector<double> alpha) {
    check_alpha_grid(alpha);
    if (alpha.size() > 1 && alpha.front() < alpha.back()) {
        std::vector<double> rev(alpha.rbegin(), alpha.rend());
        return rev;
    }
    return alpha;
}

} // namespace

Spectrum::Spectrum(std::vector<double> eigs, std::string tag)
    : eigenvalues(std::move(eigs)), generator_tag(std::move(tag)) {
    if (eigenvalues.empty()) throw std::invalid_argument("Spectrum: empty");
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        if (!(eigenvalues[k] >= 0.0) || !std::isfinite(eigenvalues[k])) {
            throw std::invalid_argument("Spectrum: eigenvalues must be finite and nonnegative");
        }
        if (k > 0 && eigenvalues[k] < eigenvalues[k - 1]) {
            throw std::invalid_argument("Spectrum: eigenvalues must be ascending");
        }
    }
}

Spectrum Spectrum::polynomial(std::size_t n, double exponent) {
    if (n == 0) throw std::invalid_argument("Spectrum::polynomial: n must be positive");
    std::vector<double> eigs(n);
    for (std::size_t k = 0; k < n; ++k) {
        eigs[k] = std::pow(static_cast<double>(k + 1), exponent);
    }
    return Spectrum(std::move(eigs), "polynomial(" + std::to_string(exponent) + ")");
}

const char* to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::tikhonov: return "tikhonov";
        case FamilyKind::pinsker: return "pinsker";
        case FamilyKind::cutoff: return "cutoff";
        case FamilyKind::landweber: return "landweber";
        case FamilyKind::custom: return "custom";
    }
    return "custom";
}

FamilyKind family_kind_from_string(const std::string& s) {
    if (s == "tikhonov") return FamilyKind::tikhonov;
    if (s == "pinsker") return FamilyKind::pinsker;
    if (s == "cutoff") return FamilyKind::cutoff;
    if (s == "landweber") return FamilyKind::landweber;
    if (s == "custom") return FamilyKind::custom;
    throw std::invalid_argument("unknown family kind: " + s);
}

void MultiplierFamily::compute_caches() {
    l1_norms_.resize(members_.size());
    sq_norms_.resize(members_.size());
    for (std::size_t j = 0; j < members_.size(); ++j) {
        l1_norms_[j] = l1_norm(members_[j].values());
        sq_norms_[j] = sq_norm(members_[j].values());
    }
    hash_ = hash_members(members_);
}

MultiplierFamily MultiplierFamily::from_members(std::vector<Multiplier> members,
                                                FamilyKind kind,
                                                std::optional<Spectrum> spectrum,
                                                std::vector<double> alpha_grid) {
    if (members.empty()) throw std::invalid_argument("MultiplierFamily: no members");
    const std::size_t n = members.front().size();
    for (const auto& m : members) {
        if (m.size() != n) throw std::invalid_argument("MultiplierFamily: member length mismatch");
    }

    // Validate the componentwise order of consecutive members and merge
    // members whose l1 gap would make the prior weight collapse to zero.
    std::vector<Multiplier> kept;
    std::vector<std::size_t> kept_src;
    kept.reserve(members.size());
    std::size_t merged = 0;
    for (std::size_t j = 0; j < members.size(); ++j) {
        auto& m = members[j];
        if (!kept.empty()) {
            const auto& prev = kept.back().values();
            const auto& cur = m.values();
            double gap = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (cur[i] < prev[i]) {
                    throw std::invalid_argument(
                        "MultiplierFamily: members cross at coordinate " + std::to_string(i));
                }
                gap += cur[i] - prev[i];
            }
            if (gap == 0.0) throw std::invalid_argument("MultiplierFamily: duplicate member");
            if (gap < merge_gap) {
                ++merged;
                kept.back() = std::move(m);  // keep the larger of the pair
                kept_src.back() = j;
                continue;
            }
        }
        kept.push_back(std::move(m));
        kept_src.push_back(j);
    }

    // Keep alpha_grid[j] aligned with members[j] when members were merged.
    if (merged > 0 && alpha_grid.size() == members.size()) {
        std::vector<double> filtered;
        filtered.reserve(kept_src.size());
        for (std::size_t j : kept_src) filtered.push_back(alpha_grid[j]);
        alpha_grid = std::move(filtered);
    }

    MultiplierFamily family;
    family.members_ = std::move(kept);
    family.spectrum_ = std::move(spectrum);
    family.alpha_grid_ = std::move(alpha_grid);
    family.kind_ = kind;
    family.validated_ = true;
    family.merged_ = merged;
    family.compute_caches();
    return family;
}

MultiplierFamily MultiplierFamily::unchecked(std::vector<Multiplier> members, FamilyKind kind) {
    if (members.empty()) throw std::invalid_argument("MultiplierFamily: no members");
    MultiplierFamily family;
    family.members_ = std::move(members);
    family.kind_ = kind;
    family.validated_ = false;
    family.compute_caches();
    return family;
}

FamilyValidation validate_ordered(const MultiplierFamily& family) {
    const auto& members = family.members();
    for (std::size_t j = 0; j < members.size(); ++j) {
        const auto& v = members[j].values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!(v[i] >= 0.0 && v[i] <= 1.0)) {
                return {false, OrderViolation{j, j, i, "entry outside [0,1]"}};
            }
            if (i > 0 && v[i] > v[i - 1]) {
                return {false, OrderViolation{j, j, i, "entries increase within member"}};
            }
        }
    }
    for (std::size_t j = 0; j + 1 < members.size(); ++j) {
        const auto& a = members[j].values();
        const auto& b = members[j + 1].values();
        if (a.size() != b.size()) {
            return {false, OrderViolation{j, j + 1, 0, "member length mismatch"}};
        }
        bool some_less = false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (b[i] < a[i]) {
                return {false, OrderViolation{j, j + 1, i, "members cross"}};
            }
            if (b[i] > a[i]) some_less = true;
        }
        if (!some_less) {
            return {false, OrderViolation{j, j + 1, 0, "duplicate members"}};
        }
    }
    return {true, std::nullopt};
}

MultiplierFamily build_tikhonov(const Spectrum& spectrum, std::vector<double> alpha_grid) {
    auto alphas = descending_alphas(std::move(alpha_grid));
    std::vector<Multiplier> members;
    members.reserve(alphas.size());
    for (double a : alphas) {
        std::vector<double> h(spectrum.size());
        for (std::size_t k = 0; k < h.size(); ++k) {
            h[k] = 1.0 / (1.0 + a * spectrum.eigenvalues[k]);
        }
        members.emplace_back(std::move(h));
    }
    // alpha_grid[j] stays aligned with members[j]: heavier smoothing first.
    return MultiplierFamily::from_members(std::move(members), FamilyKind::tikhonov,
                                          spectrum, std::move(alphas));
}

MultiplierFamily build_pinsker(const Spectrum& spectrum, std::vector<double> alpha_grid) {
    auto alphas = descending_alphas(std::move(alpha_grid));
    std::vector<Multiplier> members;
    members.reserve(alphas.size());
    for (double a : alphas) {
        std::vector<double> h(spectrum.size());
        for (std::size_t k = 0; k < h.size(); ++k) {
            h[k] = std::max(1.0 - a * spectrum.eigenvalues[k], 0.0);
        }
        members.emplace_back(std::move(h));
    }
    return MultiplierFamily::from_members(std::move(members), FamilyKind::pinsker,
                                          spectrum, std::move(alphas));
}

MultiplierFamily build_cutoff(std::size_t n, std::vector<std::size_t> cut_points) {
    if (n == 0) throw std::invalid_argument("build_cutoff: n must be positive");
    if (cut_points.empty()) throw std::invalid_argument("build_cutoff: no cut points");
    for (std::size_t j = 0; j < cut_points.size(); ++j) {
        if (cut_points[j] > n) {
            throw std::invalid_argument("build_cutoff: cut point " +
                                        std::to_string(cut_points[j]) + " exceeds n");
        }
        if (j > 0 && cut_points[j] <= cut_points[j - 1]) {
            throw std::invalid_argument("build_cutoff: cut points must be strictly increasing");
        }
    }
    std::vector<Multiplier> members;
    members.reserve(cut_points.size());
    for (std::size_t m : cut_points) {
        std::vector<double> h(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) h[i] = 1.0;
        members.emplace_back(std::move(h));
    }
    return MultiplierFamily::from_members(std::move(members), FamilyKind::cutoff);
}

MultiplierFamily build_landweber(const Spectrum& spectrum, double step,
                                 std::vector<std::size_t> iteration_counts) {
    if (!(step > 0.0)) throw std::invalid_argument("build_landweber: step must be positive");
    if (iteration_counts.empty()) throw std::invalid_argument("build_landweber: no iteration counts");
    const double lambda_max = spectrum.eigenvalues.back();
    if (step * lambda_max > 1.0) {
        throw std::invalid_argument("build_landweber: step * max eigenvalue exceeds 1 (unstable)");
    }
    for (std::size_t j = 0; j < iteration_counts.size(); ++j) {
        if (iteration_counts[j] == 0) {
            throw std::invalid_argument("build_landweber: iteration counts must be positive");
        }
        if (j > 0 && iteration_counts[j] <= iteration_counts[j - 1]) {
            throw std::invalid_argument("build_landweber: iteration counts must be strictly increasing");
        }
    }
    const std::size_t n = spectrum.size();
    std::vector<Multiplier> members;
    members.reserve(iteration_counts.size());
    for (std::size_t m : iteration_counts) {
        std::vector<double> h(n);
        // The filter 1 - (1 - step*lambda)^m grows with lambda, so the
        // eigenvalues fill the coordinates in descending order to keep each
        // member nonincreasing.
        for (std::size_t i = 0; i < n; ++i) {
            const double lam = spectrum.eigenvalues[n - 1 - i];
            h[i] = 1.0 - std::pow(1.0 - step * lam, static_cast<double>(m));
        }
        members.emplace_back(std::move(h));
    }
    return MultiplierFamily::from_members(std::move(members), FamilyKind::landweber, spectrum);
}

PriorWeights prior_weights(const MultiplierFamily& family, double beta) {
    if (!family.validated()) throw std::invalid_argument("prior_weights: family not validated");
    if (!(beta > 0.0)) throw std::invalid_argument("prior_weights: beta must be positive");
    const auto& l1 = family.l1_norms();
    PriorWeights priors;
    priors.beta = beta;
    priors.family_hash = family.members_hash();
    priors.weights.resize(family.size());
    for (std::size_t j = 0; j + 1 < family.size(); ++j) {
        priors.weights[j] = -std::expm1(-(l1[j + 1] - l1[j]) / beta);
    }
    priors.weights.back() = 1.0;
    return priors;
}

double check_prior_identity(const PriorWeights& priors, const MultiplierFamily& family) {
    if (priors.family_hash != family.members_hash()) {
        throw std::invalid_argument("check_prior_identity: priors built from a different family");
    }
    const auto& l1 = family.l1_norms();
    const double beta = priors.beta;
    double worst = 0.0;
    for (std::size_t j = 0; j < family.size(); ++j) {
        // sum_{g >= h} pi_g exp(-(||g||_1 - ||h||_1)/beta) should be exactly 1.
        CompensatedSum acc;
        for (std::size_t k = j; k < family.size(); ++k) {
            acc.add(priors.weights[k] * std::exp(-(l1[k] - l1[j]) / beta));
        }
        worst = std::max(worst, std::abs(acc.value() - 1.0));
    }
    return worst;
}

namespace {

ConditionReport condition_from_pairs(const MultiplierFamily& family, bool all_pairs) {
    const auto& members = family.members();
    const auto& l1 = family.l1_norms();
    const auto& sq = family.sq_norms();
    ConditionReport report;
    report.k_lower = std::numeric_limits<double>::infinity();

    for (std::size_t j = 0; j + 1 < members.size(); ++j) {
        const std::size_t k_end = all_pairs ? members.size() : j + 2;
        for (std::size_t k = j + 1; k < k_end; ++k) {
            const double denom = l1[k] - l1[j];
            if (denom <= 0.0) continue;  // cannot happen for validated families
            const double ratio = (sq[k] - sq[j]) / denom;
            if (ratio < report.k_lower) {
                report.k_lower = ratio;
                report.k_lower_pair = {j, k};
            }
        }
    }

    report.k_upper = 0.0;
    std::size_t ratios = 0;
    for (std::size_t j = 0; j + 1 < members.size(); ++j) {
        if (sq[j] == 0.0) {
            report.excluded_zero_member = j;
            continue;
        }
        ++ratios;
        const double ratio = sq[j + 1] / sq[j];
        if (ratio > report.k_upper) {
            report.k_upper = ratio;
            report.k_upper_index = j;
        }
    }
    if (ratios == 0) report.k_upper = 1.0;  // vacuous

    report.lower_positive = report.k_lower > 0.0;
    report.upper_finite = std::isfinite(report.k_upper) && report.k_upper > 0.0;
    return report;
}

} // namespace

ConditionReport check_condition(const MultiplierFamily& family) {
    if (!family.validated()) throw std::invalid_argument("check_condition: family not validated");
    return condition_from_pairs(family, false);
}

ConditionReport check_condition_all_pairs(const MultiplierFamily& family) {
    if (!family.validated()) throw std::invalid_argument("check_condition: family not validated");
    return condition_from_pairs(family, true);
}

} // namespace ewsmooth
