// Built-in models: posteriors, exact p-values and frequency runs.

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "ppp/distributions.hpp"
#include "ppp/models.hpp"

using namespace ppp;

namespace {

// P for port `pi`, enumerated directly from the pmfs and posterior weights.
double port_oracle(const std::vector<std::vector<double>>& h, const std::vector<double>& post,
                   std::size_t pi) {
    double p = 0.0;
    for (std::size_t t = 0; t < h.size(); ++t) {
        double q = 0.0;
        for (std::size_t j = 0; j < h[t].size(); ++j) {
            if (h[t][j] <= h[t][pi]) q += h[t][j];
        }
        p += post[t] * q;
    }
    return p;
}

} // namespace

TEST_CASE("worked port model") {
    const std::vector<std::vector<double>> h{{0.7, 0.2, 0.1}, {0.1, 0.2, 0.7}};
    const auto m = port_model(h);
    const Observation d{1.0, 1};
    CHECK(m->conditional_sf(0.0, d) == doctest::Approx(0.3));
    CHECK(m->conditional_sf(1.0, d) == doctest::Approx(0.3));
    CHECK(m->exact_ppp(d) == doctest::Approx(0.3));
    for (std::size_t pi = 0; pi < 3; ++pi) {
        CHECK(m->exact_ppp({static_cast<double>(pi), pi}) ==
              doctest::Approx(port_oracle(h, {0.5, 0.5}, pi)));
    }
    // Posterior degenerate on an app, observed port its most likely one.
    const auto degenerate = port_model(h, {PortPosterior::Kind::Fixed, {1.0, 0.0}});
    CHECK(degenerate->exact_ppp({0.0, 0}) == doctest::Approx(1.0));
}

TEST_CASE("port model with Bayes posterior") {
    const std::vector<std::vector<double>> h{{0.5, 0.3, 0.2}, {0.1, 0.1, 0.8}};
    const auto m = port_model(h, {PortPosterior::Kind::Bayes, {}});
    const auto post = m->posterior({1.0, 1});
    REQUIRE(post.size() == 2);
    CHECK(post[0].mass == doctest::Approx(0.3 / 0.4));
    CHECK(m->exact_ppp({1.0, 1}) == doctest::Approx(port_oracle(h, {0.75, 0.25}, 1)));
    CHECK_THROWS_AS(port_model({{0.5, 0.6}}), std::invalid_argument);
    CHECK_THROWS_AS(port_model({{0.5, 0.5}, {1.0}}), std::invalid_argument);
}

TEST_CASE("lasso model posterior and exact p-value") {
    const auto m = lasso_model(0.1);
    // On the stem both directions give the same distance.
    const Observation stem{0.5, 0};
    const auto post = m->posterior(stem);
    CHECK(post[0].mass == doctest::Approx(0.5));
    CHECK(m->exact_ppp(stem) == doctest::Approx(0.5));
    // On the loop the two directions disagree; with G(t) = 1 - t the
    // posterior is uniform and P averages the two survivals.
    const Observation loop{0.85, 0};
    const double d0 = 2.0 - 0.2 - 0.85;
    CHECK(m->exact_ppp(loop) == doctest::Approx(0.5 * (1 - 0.85) + 0.5 * (1 - d0)));
    CHECK(m->exact_ppp(loop) == doctest::Approx(0.1));
    CHECK_THROWS_AS(lasso_model(0.6), std::domain_error);
}

TEST_CASE("lasso frequency run has the worst-case law") {
    const auto run = frequency_run(*lasso_model(0.1), 200000, RngStream(11, 0));
    const auto fit = mixed_fit(run.sample(), p2alpha(0.1));
    CHECK(std::abs(fit.atoms[0].observed - 0.2) < 0.006);
    CHECK(fit.continuous_ks < 0.01);
}

TEST_CASE("simplex model reaches the atom at alpha") {
    const auto m = simplex_model(0.1);
    CHECK(m->atom() == doctest::Approx(0.1));
    const auto literal = simplex_model_literal(0.1);
    CHECK(literal->atom() == doctest::Approx(0.2 / 1.2));
    CHECK_THROWS_AS(simplex_model(0.6), std::domain_error);
    const auto run = frequency_run(*m, 200000, RngStream(5, 0));
    const auto fit = mixed_fit(run.sample(), p2alpha(0.1));
    CHECK(std::abs(fit.atoms[0].observed - 0.2) < 0.006);
    CHECK(fit.continuous_ks < 0.01);
    CHECK_THROWS_AS(m->posterior({1.5, 0}), std::domain_error);
}

TEST_CASE("Ruschendorf construction") {
    CHECK(ruschendorf_draw(0.1, 0.05) == 0.1);
    CHECK(ruschendorf_draw(0.1, 0.5) == 0.5);
    RngStream a(7, 0);
    RngStream b(7, 0);
    CHECK(ruschendorf_values(0.25, a, 10) == ruschendorf_values(0.25, b, 10));
    CHECK_THROWS_AS(ruschendorf_values(0.0, a, 10), std::domain_error);
}

TEST_CASE("frequency runs do not depend on the worker count") {
    const auto m = lasso_model(0.2);
    setenv("PPP_THREADS", "1", 1);
    const auto one = frequency_run(*m, 20000, RngStream(9, 0));
    setenv("PPP_THREADS", "5", 1);
    const auto five = frequency_run(*m, 20000, RngStream(9, 0));
    unsetenv("PPP_THREADS");
    CHECK(one.values == five.values);
    CHECK(one.model_id == m->id());
}

TEST_CASE("run summary") {
    const EmpiricalSample s({0.1, 0.1, 0.5, 0.9});
    const auto r = summarize(s);
    CHECK(r.n == 4);
    CHECK(r.tail_probs.size() == r.tail_alphas.size());
    CHECK(r.ecdf_grid.size() == 512);
    CHECK(tail_probability(s, 0.1) == 0.5);
    // Two values at 0.1 give phi_emp(0.5) = 0.2 > 0.125.
    CHECK(r.max_idf_excess > 0.0);
    const auto u = summarize(EmpiricalSample({0.5}));
    CHECK(u.max_idf_excess <= 1e-15);
}
