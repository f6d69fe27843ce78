#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "ewsmooth/families.hpp"
#include "ewsmooth/sum.hpp"
#include "helpers.hpp"

using namespace ewsmooth;

namespace {

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
    std::vector<double> grid(count);
    for (std::size_t j = 0; j < count; ++j) {
        grid[j] = lo * std::pow(hi / lo, static_cast<double>(j) / (count - 1));
    }
    return grid;
}

} // namespace

TEST_CASE("build_tikhonov: formula, limits, degenerate spectrum") {
    Spectrum two({1.0, 2.0}, "explicit");

    const auto f = build_tikhonov(two, {1.0});
    CHECK(f[0].values()[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f[0].values()[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    // alpha -> 0 limit approaches the identity multiplier
    Spectrum big({1.0, 1000.0}, "explicit");
    const auto near_id = build_tikhonov(big, {1e-12, 1.0});
    for (double h : near_id[1].values()) CHECK(h >= 1.0 - 1e-8);

    // all-zero spectrum collapses every member onto all-ones
    Spectrum flat({0.0, 0.0}, "explicit");
    CHECK_THROWS_AS(build_tikhonov(flat, {0.5, 1.0}), std::invalid_argument);

    CHECK_THROWS_AS(build_tikhonov(two, {1.0, 0.5, 0.7}), std::invalid_argument);
    CHECK_THROWS_AS(build_tikhonov(two, {-1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("build_pinsker: clipped-linear formula") {
    Spectrum two({1.0, 2.0}, "explicit");

    const auto a = build_pinsker(two, {0.4});
    CHECK(a[0].values()[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(a[0].values()[1] == doctest::Approx(0.2).epsilon(1e-15));

    const auto b = build_pinsker(two, {0.6});
    CHECK(b[0].values()[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(b[0].values()[1] == 0.0);
    CHECK(b[0].values()[0] >= b[0].values()[1]);

    // alpha lambda >= 1 everywhere: the all-zeros member appears
    const auto c = build_pinsker(two, {0.5, 2.0});
    CHECK(c[0].values() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("build_cutoff: projection members") {
    const auto f = build_cutoff(4, {0, 2, 4});
    CHECK(f[0].values() == std::vector<double>{0.0, 0.0, 0.0, 0.0});
    CHECK(f[1].values() == std::vector<double>{1.0, 1.0, 0.0, 0.0});
    CHECK(f[2].values() == std::vector<double>{1.0, 1.0, 1.0, 1.0});
    CHECK_THROWS_AS(build_cutoff(4, {0, 5}), std::invalid_argument);
    CHECK_THROWS_AS(build_cutoff(4, {2, 2}), std::invalid_argument);
}

TEST_CASE("build_landweber: filter values and stability") {
    Spectrum one({1.0}, "explicit");
    const auto saturated = build_landweber(one, 1.0, {1});
    CHECK(saturated[0].values()[0] == 1.0);

    Spectrum half({0.5}, "explicit");
    const auto two_steps = build_landweber(half, 1.0, {2});
    CHECK(two_steps[0].values()[0] == doctest::Approx(0.75).epsilon(1e-15));

    // zero eigenvalues never pass the filter
    Spectrum with_zero({0.0, 0.25}, "explicit");
    const auto f = build_landweber(with_zero, 1.0, {1, 3});
    for (const auto& m : f.members()) CHECK(m.values().back() == 0.0);

    // descending eigenvalue order keeps members valid at n >= 2
    Spectrum pair({0.25, 0.5}, "explicit");
    const auto g = build_landweber(pair, 1.0, {1, 2});
    CHECK(validate_ordered(g).valid);
    CHECK(g[0].values()[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g[0].values()[1] == doctest::Approx(0.25).epsilon(1e-15));

    Spectrum hot({0.5, 3.0}, "explicit");
    CHECK_THROWS_AS(build_landweber(hot, 1.0, {1}), std::invalid_argument);
    CHECK_THROWS_AS(build_landweber(half, 1.0, {2, 2}), std::invalid_argument);
    CHECK_THROWS_AS(build_landweber(half, 1.0, {0}), std::invalid_argument);
}

TEST_CASE("validate_ordered: verdicts with witnesses") {
    const auto good = build_tikhonov(Spectrum::polynomial(10, 2.0), geometric_grid(1e-4, 10, 8));
    CHECK(validate_ordered(good).valid);

    const auto crossing = MultiplierFamily::unchecked(
        {Multiplier::unchecked({0.5, 0.5}), Multiplier::unchecked({1.0, 0.0})});
    const auto verdict = validate_ordered(crossing);
    REQUIRE_FALSE(verdict.valid);
    CHECK(verdict.violation->coordinate == 1);
    CHECK(verdict.violation->member_a == 0);
    CHECK(verdict.violation->member_b == 1);

    const auto out_of_range =
        MultiplierFamily::unchecked({Multiplier::unchecked({1.2, 0.5})});
    const auto range_verdict = validate_ordered(out_of_range);
    REQUIRE_FALSE(range_verdict.valid);
    CHECK(range_verdict.violation->what == "entry outside [0,1]");

    CHECK_THROWS_AS(MultiplierFamily::from_members(
                        {Multiplier({0.5, 0.5}), Multiplier({0.5, 0.5})}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MultiplierFamily::from_members({}), std::invalid_argument);
    CHECK_THROWS_AS(MultiplierFamily::unchecked({}), std::invalid_argument);
}

TEST_CASE("prior_weights: top member, unit gap, near-duplicate merging") {
    auto family = MultiplierFamily::from_members({Multiplier({0.0}), Multiplier({1.0})});
    const auto priors = prior_weights(family, 1.0);
    CHECK(priors.weights[1] == 1.0);
    CHECK(priors.weights[0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(priors.weights[0] == doctest::Approx(0.6321205588285577).epsilon(1e-12));

    // gap below the merge threshold: members collapse instead of pi = 0
    auto merged = MultiplierFamily::from_members(
        {Multiplier({0.0}), Multiplier({0.5}), Multiplier({0.5 + 1e-11})});
    CHECK(merged.size() == 2);
    CHECK(merged.merged_members() == 1);
    CHECK(merged[1].values()[0] == 0.5 + 1e-11);

    CHECK_THROWS_AS(prior_weights(MultiplierFamily::unchecked({Multiplier({0.5})}), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(prior_weights(family, 0.0), std::invalid_argument);
}

TEST_CASE("prior_weights: depend only on the l1 gap sequence") {
    const auto a = build_cutoff(2, {0, 1, 2});
    const auto b = MultiplierFamily::from_members(
        {Multiplier({0.0, 0.0}), Multiplier({1.0, 0.0}), Multiplier({1.0, 1.0})});
    const auto pa = prior_weights(a, 2.5);
    const auto pb = prior_weights(b, 2.5);
    for (std::size_t j = 0; j < pa.weights.size(); ++j) {
        CHECK(pa.weights[j] == pb.weights[j]);
    }
}

TEST_CASE("check_prior_identity: telescoping residual at 1e-12") {
    // single member: identity holds exactly
    auto singleton = MultiplierFamily::from_members({Multiplier({0.5, 0.25})});
    CHECK(check_prior_identity(prior_weights(singleton, 4.0), singleton) == 0.0);

    for (double beta : {1.0, 4.0}) {
        const auto tik =
            build_tikhonov(Spectrum::polynomial(100, 2.0), geometric_grid(1e-6, 1e2, 50));
        CHECK(check_prior_identity(prior_weights(tik, beta), tik) <= 1e-12);

        const auto pin =
            build_pinsker(Spectrum::polynomial(100, 4.0), geometric_grid(1e-9, 1e-1, 40));
        CHECK(check_prior_identity(prior_weights(pin, beta), pin) <= 1e-12);

        std::vector<std::size_t> cuts;
        for (std::size_t m = 0; m <= 100; m += 2) cuts.push_back(m);
        const auto cut = build_cutoff(100, cuts);
        CHECK(check_prior_identity(prior_weights(cut, beta), cut) <= 1e-12);
    }

    auto family = build_cutoff(8, {1, 3, 8});
    auto priors = prior_weights(family, 1.0);
    auto other = build_cutoff(8, {1, 3, 7});
    CHECK_THROWS_AS(check_prior_identity(priors, other), std::invalid_argument);
}

TEST_CASE("check_condition: cutoff constants are exact") {
    std::vector<std::size_t> cuts;
    for (std::size_t m = 1; m <= 12; ++m) cuts.push_back(m);
    const auto family = build_cutoff(12, cuts);
    const auto report = check_condition(family);
    CHECK(report.k_lower == 1.0);  // h^2 = h for 0/1 entries
    CHECK(report.k_upper == 2.0);  // (m+1)/m maximized at m = 1
    CHECK(*report.k_upper_index == 0);
    CHECK(report.satisfied());
    CHECK_FALSE(report.excluded_zero_member.has_value());

    // all-zeros member is excluded from the successor ratio and recorded
    const auto with_zero = build_cutoff(6, {0, 2, 4});
    const auto zr = check_condition(with_zero);
    CHECK(zr.excluded_zero_member.has_value());
    CHECK(*zr.excluded_zero_member == 0);
    CHECK(zr.satisfied());
}

TEST_CASE("check_condition: consecutive scan equals the all-pairs scan") {
    const auto tik = build_tikhonov(Spectrum::polynomial(20, 2.0), geometric_grid(1e-4, 10, 10));
    const auto fast = check_condition(tik);
    const auto brute = check_condition_all_pairs(tik);
    CHECK(fast.k_lower == brute.k_lower);
    CHECK(fast.k_upper == brute.k_upper);
    CHECK(fast.k_lower_pair == brute.k_lower_pair);
    CHECK(fast.k_upper_index == brute.k_upper_index);
    CHECK(fast.k_lower > 0.0);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto family = testgen::power_family(15, 8, seed + 300);
        const auto a = check_condition(family);
        const auto b = check_condition_all_pairs(family);
        CHECK(a.k_lower == b.k_lower);
        CHECK(a.k_lower_pair == b.k_lower_pair);
    }
}

TEST_CASE("prior mass bounds follow from the empirical constants") {
    const auto families = {
        build_tikhonov(Spectrum::polynomial(30, 2.0), geometric_grid(1e-5, 1e2, 12)),
        build_cutoff(20, {1, 3, 5, 9, 14, 20}),
    };
    for (const auto& family : families) {
        const double beta = 4.0;
        const auto priors = prior_weights(family, beta);
        const auto condition = check_condition(family);
        const auto& sq = family.sq_norms();

        // cumulative prior mass against (K_upper ||h||^2 - ||h_min||^2)/(K_lower beta),
        // for members with a successor and a nonzero norm
        CompensatedSum cumulative;
        for (std::size_t j = 0; j + 1 < family.size(); ++j) {
            cumulative.add(priors.weights[j]);
            if (sq[j] == 0.0) continue;
            const double bound =
                (condition.k_upper * sq[j] - sq.front()) / (condition.k_lower * beta);
            CHECK(cumulative.value() <= bound + 1e-12);
        }

        // every norm band [||h||^2, ||h||^2 + 1] carries positive prior mass
        for (std::size_t j = 0; j < family.size(); ++j) {
            double band = 0.0;
            for (std::size_t k = 0; k < family.size(); ++k) {
                if (sq[k] >= sq[j] && sq[k] <= sq[j] + 1.0) band += priors.weights[k];
            }
            CHECK(band > 0.0);
        }
    }
}

TEST_CASE("alpha grid stays aligned with the member order") {
    Spectrum spectrum({1.0, 4.0, 9.0}, "explicit");
    const auto family = build_tikhonov(spectrum, {0.01, 0.1, 1.0, 10.0});
    REQUIRE(family.alpha_grid().size() == family.size());
    for (std::size_t j = 0; j < family.size(); ++j) {
        const double a = family.alpha_grid()[j];
        for (std::size_t k = 0; k < spectrum.size(); ++k) {
            CHECK(family[j].values()[k] ==
                  doctest::Approx(1.0 / (1.0 + a * spectrum.eigenvalues[k])).epsilon(1e-15));
        }
    }
    CHECK(family.alpha_grid().front() == 10.0);  // heaviest smoothing first
}

TEST_CASE("generated families always validate") {
    CHECK(validate_ordered(build_tikhonov(Spectrum::polynomial(25, 2.0),
                                          geometric_grid(1e-6, 1e2, 30)))
              .valid);
    CHECK(validate_ordered(build_pinsker(Spectrum::polynomial(25, 4.0),
                                         geometric_grid(1e-10, 1e-2, 30)))
              .valid);
    CHECK(validate_ordered(build_cutoff(25, {0, 1, 5, 25})).valid);
    Spectrum lam({0.1, 0.2, 0.4, 0.9}, "explicit");
    CHECK(validate_ordered(build_landweber(lam, 1.0, {1, 2, 4, 8})).valid);
}
