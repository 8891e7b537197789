// Sub-uniform laws: CDFs, quantiles, sampling and the sub-uniformity check.

#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "ppp/distributions.hpp"

using namespace ppp;

TEST_CASE("worst-case law P_{2 alpha}") {
    const auto d = p2alpha(0.1);
    CHECK(d.cdf(0.0999) == 0.0);
    CHECK(d.cdf(0.1) == doctest::Approx(0.2));
    CHECK(d.cdf_left(0.1) == 0.0);
    CHECK(d.cdf(0.6) == doctest::Approx(0.2 + 0.8 * 0.4 / 0.8));
    CHECK(d.mean() == doctest::Approx(0.5));
    // Variance: 0.2 * 0.01 + 0.8 * E(U[0.2,1]^2) - 0.25.
    CHECK(d.variance() == doctest::Approx(0.002 + 0.8 * (1.0 - 0.008) / (3 * 0.8) - 0.25));
    CHECK(d.quantile(0.0001) == 0.1);
    CHECK(d.quantile(0.2) == 0.1);
    CHECK(d.quantile(0.6) == doctest::Approx(0.6));
    CHECK_THROWS_AS(p2alpha(0.0), std::domain_error);
    CHECK_THROWS_AS(p2alpha(0.6), std::domain_error);
    const auto half = p2alpha(0.5);
    CHECK(half.cdf(0.5) == 1.0);
}

TEST_CASE("sampled atoms are returned verbatim") {
    RngStream rng(1, 0);
    const auto v = sample_values(p2alpha(0.25), rng, 20000);
    std::size_t at = 0;
    for (double x : v) at += x == 0.25;
    CHECK(static_cast<double>(at) / v.size() == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("Beta(2,2) quantile inverts the CDF") {
    const SubUniformDist b(Beta22{});
    for (double u : {0.001, 0.1, 0.5, 0.77, 0.999}) {
        const double x = b.quantile(u);
        CHECK(3 * x * x - 2 * x * x * x == doctest::Approx(u).epsilon(1e-12));
    }
    CHECK(b.mean() == doctest::Approx(0.5));
    CHECK(b.variance() == doctest::Approx(0.05));
}

TEST_CASE("mixture validation") {
    CHECK_THROWS_AS(SubUniformDist(PointMassUniformMixture{{{0.5, 0.7}}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(SubUniformDist(PointMassUniformMixture{{{1.5, 1.0}}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(SubUniformDist(PointMassUniformMixture{{{0.5, -0.1}, {0.5, 1.1}}, {}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(SubUniformDist(PointMassUniformMixture{{}, {{0.6, 0.4, 1.0}}}),
                    std::invalid_argument);
    // A degenerate piece becomes an atom.
    const SubUniformDist d(PointMassUniformMixture{{}, {{0.5, 0.5, 1.0}}});
    REQUIRE(d.mixture() != nullptr);
    CHECK(d.mixture()->atoms.size() == 1);
}

TEST_CASE("every built-in law is sub-uniform") {
    for (const auto& nd : builtin_sub_uniform()) {
        CAPTURE(nd.name);
        const auto c = is_sub_uniform(nd.dist);
        CHECK(c.sub_uniform);
        CHECK(c.mean == doctest::Approx(0.5));
        // Any sub-uniform law has variance at most that of the uniform.
        CHECK(nd.dist.variance() <= 1.0 / 12.0 + 1e-12);
    }
}

TEST_CASE("laws outside the family are rejected") {
    const SubUniformDist high(PointMassUniformMixture{{{0.9, 1.0}}, {}});
    CHECK_FALSE(is_sub_uniform(high).sub_uniform);
    // Mean 1/2 but more spread than the uniform.
    const SubUniformDist ends(PointMassUniformMixture{{{0.0, 0.5}, {1.0, 0.5}}, {}});
    const auto c = is_sub_uniform(ends);
    CHECK_FALSE(c.sub_uniform);
    CHECK(c.dominance.witness.has_value());
}

TEST_CASE("IDF of a mixture matches the uniform at 1") {
    for (const auto& nd : builtin_sub_uniform()) {
        CAPTURE(nd.name);
        CHECK(idf_of(nd.dist).evaluate(1.0) == doctest::Approx(0.5));
    }
}

TEST_CASE("mixed_fit on an exact sample") {
    RngStream rng(3, 0);
    const auto s = sample(p2alpha(0.1), rng, 200000);
    const auto fit = mixed_fit(s, p2alpha(0.1));
    REQUIRE(fit.atoms.size() == 1);
    CHECK(fit.atoms[0].expected == doctest::Approx(0.2));
    CHECK(fit.max_atom_error() < 0.005);
    CHECK(fit.continuous_mass == doctest::Approx(0.8));
    CHECK(fit.continuous_ks < 0.005);
}
