#pragma once

#include <cstddef>
#include <string>

#include "ppp/models.hpp"

namespace ppp {

// Posterior draws theta_1, ..., theta_M for a fixed dataset.
//
// Iid: independent draws. Markov: a lazy independence chain that keeps the
// previous state with probability rho and otherwise moves to a fresh
// posterior draw. It is reversible with the posterior as stationary law,
// every lag-1 autocorrelation equals rho, and the first state is a
// stationary draw, so each theta_i has exactly the posterior as its law.
struct PosteriorSampler {
    enum class Kind { Iid, Markov };
    Kind kind = Kind::Iid;
    double rho = 0.0;

    static PosteriorSampler iid() { return {}; }
    // Throws std::domain_error unless 0 <= rho < 1.
    static PosteriorSampler markov(double rho);
};

enum class EstimatorKind { PHat, RHat };

std::string to_string(EstimatorKind k);

// (1/M) sum 1{f(D*_i, theta_i) >= f(D, theta_i)}, D*_i drawn given theta_i.
double estimate_p_hat(const GenerativeModel& model, const Observation& d, std::size_t m,
                      const PosteriorSampler& sampler, RngStream& rng);

// (1/M) sum P{f(D*, theta_i) >= f(D, theta_i) | theta_i, D}.
double estimate_r_hat(const GenerativeModel& model, const Observation& d, std::size_t m,
                      const PosteriorSampler& sampler, RngStream& rng);

// n_outer replicates of: draw (theta, D) from the model, then run the
// estimator on D. Parallel over fixed blocks with per-block streams.
EmpiricalSample marginal_estimator_run(const GenerativeModel& model, std::size_t m,
                                       const PosteriorSampler& sampler, EstimatorKind kind,
                                       std::size_t n_outer, const RngStream& rng);

} // namespace ppp
