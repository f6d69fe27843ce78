#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "ewsmooth/families.hpp"
#include "ewsmooth/model.hpp"
#include "ewsmooth/sum.hpp"
#include "helpers.hpp"

using namespace ewsmooth;

TEST_CASE("generate_observation: vanishing noise tracks the mean") {
    MeanVector mu({1.0, 2.0});
    CounterRng rng(CounterRng::derive_key(7, 0));
    const Observation y = generate_observation(mu, 1e-12, rng);
    CHECK(std::abs(y.values[0] - 1.0) <= 1e-9);
    CHECK(std::abs(y.values[1] - 2.0) <= 1e-9);
}

TEST_CASE("generate_observation: sample moments at n = 1e5") {
    const std::size_t n = 100000;
    MeanVector mu(std::vector<double>(n, 0.0));
    CounterRng rng(CounterRng::derive_key(20260809, 0));
    const Observation y = generate_observation(mu, 1.0, rng);

    const double mean = compensated_sum(y.values) / static_cast<double>(n);
    CHECK(std::abs(mean) <= 3.0 / std::sqrt(static_cast<double>(n)));

    CompensatedSum ss;
    for (double v : y.values) ss.add((v - mean) * (v - mean));
    const double var = ss.value() / static_cast<double>(n - 1);
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("generate_observation: same seed, identical draws") {
    MeanVector mu({0.5, -1.5, 3.0});
    CounterRng a(CounterRng::derive_key(42, 3));
    CounterRng b(CounterRng::derive_key(42, 3));
    const Observation ya = generate_observation(mu, 0.7, a);
    const Observation yb = generate_observation(mu, 0.7, b);
    for (std::size_t i = 0; i < mu.size(); ++i) CHECK(ya.values[i] == yb.values[i]);
}

TEST_CASE("generate_observation: rejects non-positive sigma") {
    MeanVector mu({1.0});
    CounterRng rng(1);
    CHECK_THROWS_AS(generate_observation(mu, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(generate_observation(mu, -1.0, rng), std::invalid_argument);
}

TEST_CASE("linear_estimate: identity, zero, direct values") {
    Observation y({2.0, 4.0}, 1.0);
    CHECK(linear_estimate(y, Multiplier({1.0, 1.0})) == std::vector<double>{2.0, 4.0});
    CHECK(linear_estimate(y, Multiplier({0.0, 0.0})) == std::vector<double>{0.0, 0.0});
    CHECK(linear_estimate(y, Multiplier({0.5, 0.25})) == std::vector<double>{1.0, 1.0});
    CHECK_THROWS_AS(linear_estimate(y, Multiplier({1.0})), std::invalid_argument);
}

TEST_CASE("linear_estimate: homogeneous in Y") {
    const auto yv = testgen::random_vector(16, 2.0, 11);
    const auto family = testgen::power_family(16, 4, 11);
    const Multiplier& h = family[2];
    Observation y(yv, 1.0);
    std::vector<double> scaled = yv;
    for (double& v : scaled) v *= 4.0;  // power of two: exact scaling
    Observation y4(scaled, 1.0);
    const auto e1 = linear_estimate(y, h);
    const auto e4 = linear_estimate(y4, h);
    for (std::size_t i = 0; i < e1.size(); ++i) CHECK(e4[i] == 4.0 * e1[i]);
}

TEST_CASE("exact_risk: pure-variance, pure-bias, direct value") {
    MeanVector mu({2.0, 1.0});
    CHECK(exact_risk(Multiplier({1.0, 1.0}), mu, 0.5) == doctest::Approx(0.25 * 2).epsilon(1e-15));
    CHECK(exact_risk(Multiplier({0.0, 0.0}), mu, 0.5) == doctest::Approx(5.0).epsilon(1e-15));
    // (0.5*2)^2 + (0.75*1)^2 + 1*(0.25 + 0.0625); all dyadic
    CHECK(exact_risk(Multiplier({0.5, 0.25}), mu, 1.0) == 1.875);
    CHECK_THROWS_AS(exact_risk(Multiplier({0.5}), mu, 1.0), std::invalid_argument);
}

TEST_CASE("exact_risk: nonnegative; zero only in the degenerate case") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto family = testgen::power_family(12, 5, seed + 100);
        const auto muv = testgen::random_vector(12, 1.5, seed + 100);
        MeanVector mu(muv);
        for (const auto& m : family.members()) CHECK(exact_risk(m, mu, 0.3) >= 0.0);
    }
    MeanVector zero(std::vector<double>(4, 0.0));
    CHECK(exact_risk(Multiplier(std::vector<double>(4, 0.0)), zero, 1.0) == 0.0);
}

TEST_CASE("ure: closed forms and direct value") {
    Observation y({1.0, -2.0, 0.5}, 0.7);
    const double s2 = 0.49;
    // h = 1: residual zero, 2 sigma^2 n - sigma^2 n regardless of Y
    CHECK(ure(y, Multiplier({1.0, 1.0, 1.0})) == doctest::Approx(3 * s2).epsilon(1e-15));
    // h = 0: ||Y||^2 - sigma^2 n
    CHECK(ure(y, Multiplier({0.0, 0.0, 0.0})) ==
          doctest::Approx(5.25 - 3 * s2).epsilon(1e-15));

    Observation y1({2.0}, 1.0);
    CHECK(ure(y1, Multiplier({0.5})) == 1.0);  // (2-1)^2 + 2*0.5 - 1
    CHECK_THROWS_AS(ure(y1, Multiplier({0.5, 0.5})), std::invalid_argument);
}

TEST_CASE("ure: Monte Carlo mean matches exact risk within 4 SE") {
    const std::size_t n = 50;
    const std::size_t reps = 20000;
    const auto family = testgen::power_family(n, 3, 5);
    const Multiplier& h = family[1];
    MeanVector mu(testgen::random_vector(n, 1.0, 5));
    const double sigma = 0.8;
    const double truth = exact_risk(h, mu, sigma);

    std::vector<double> values(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        CounterRng rng(CounterRng::derive_key(99, r));
        values[r] = ure(generate_observation(mu, sigma, rng), h);
    }
    const double mean = compensated_sum(values) / static_cast<double>(reps);
    CompensatedSum ss;
    for (double v : values) ss.add((v - mean) * (v - mean));
    const double se = std::sqrt(ss.value() / (reps - 1.0) / reps);
    CHECK(std::abs(mean - truth) <= 4.0 * se);
}

TEST_CASE("oracle_risk: two-member families") {
    auto family = MultiplierFamily::from_members(
        {Multiplier({0.0, 0.0}), Multiplier({1.0, 1.0})});

    MeanVector zero({0.0, 0.0});
    auto at_zero = oracle_risk(family, zero, 1.0);
    CHECK(at_zero.risk == 0.0);
    CHECK(at_zero.index == 0);

    MeanVector big({3.0, 3.0});  // ||mu||^2 = 18 > sigma^2 n = 2
    auto at_big = oracle_risk(family, big, 1.0);
    CHECK(at_big.risk == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(at_big.index == 1);

    // Exact tie at ||mu||^2 = sigma^2 n: smaller l1 norm wins.
    MeanVector tie({1.0, 1.0});
    CHECK(oracle_risk(family, tie, 1.0).index == 0);
}

TEST_CASE("oracle_risk: equals the exhaustive scan on a Tikhonov path") {
    const std::size_t n = 100;
    std::vector<double> alphas(50);
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        alphas[j] = 1e-4 * std::pow(1e6, static_cast<double>(j) / 49.0);
    }
    const auto family = build_tikhonov(Spectrum::polynomial(n, 2.0), alphas);
    std::vector<double> muv(n);
    for (std::size_t k = 0; k < n; ++k) muv[k] = 1.0 / static_cast<double>(k + 1);
    MeanVector mu(muv);

    const auto result = oracle_risk(family, mu, 0.1);
    CHECK(result.index == oracle::risk_scan(family, muv, 0.1));
    CHECK(result.risk ==
          doctest::Approx(oracle::risk(family[result.index].values(), muv, 0.1))
              .epsilon(1e-12));
}

TEST_CASE("compensated summation: controlled error on million-term sums") {
    const std::size_t n = 1000000;
    CounterRng rng(CounterRng::derive_key(2024, 0));
    std::vector<double> xs(n);
    for (double& x : xs) x = rng.next_normal() * std::exp(6.0 * rng.next_uniform());

    long double reference = 0.0L;
    for (double x : xs) reference += static_cast<long double>(x);

    const double fast = compensated_sum(xs);
    const double ref = static_cast<double>(reference);
    CHECK(std::abs(fast - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));

    // risk sums at this length stay reproducible and near the wide result
    MeanVector mu(xs);
    std::vector<double> hv(n);
    for (std::size_t i = 0; i < n; ++i) {
        hv[i] = 1.0 / (1.0 + 1e-9 * static_cast<double>(i) * static_cast<double>(i));
    }
    Multiplier h(hv);
    const double risk1 = exact_risk(h, mu, 0.5);
    const double risk2 = exact_risk(h, mu, 0.5);
    CHECK(risk1 == risk2);

    long double wide = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double bias = (1.0L - hv[i]) * xs[i];
        wide += bias * bias;
    }
    long double var = 0.0L;
    for (std::size_t i = 0; i < n; ++i) var += static_cast<long double>(hv[i]) * hv[i];
    const double wide_risk = static_cast<double>(wide + 0.25L * var);
    CHECK(risk1 == doctest::Approx(wide_risk).epsilon(1e-12));
}

TEST_CASE("multiplier invariants enforced") {
    CHECK_THROWS_AS(Multiplier({0.5, 0.6}), std::invalid_argument);   // increasing
    CHECK_THROWS_AS(Multiplier({1.2, 0.5}), std::invalid_argument);   // out of range
    CHECK_THROWS_AS(Multiplier({0.5, -0.1}), std::invalid_argument);
    CHECK_NOTHROW(Multiplier({1.0, 0.5, 0.5, 0.0}));
    CHECK_NOTHROW(Multiplier::unchecked({1.2, 0.5}));
}
