#include "ppp/estimators.hpp"

#include <stdexcept>

#include "ppp/parallel.hpp"

namespace ppp {

namespace {

class ThetaChain {
  public:
    ThetaChain(const GenerativeModel& model, const Observation& d, const PosteriorSampler& s,
               RngStream& rng)
        : model_(model), d_(d), s_(s), rng_(rng) {}

    double next() {
        if (!started_ || s_.kind == PosteriorSampler::Kind::Iid || rng_.uniform() >= s_.rho) {
            state_ = model_.sample_posterior(d_, rng_);
            started_ = true;
        }
        return state_;
    }

  private:
    const GenerativeModel& model_;
    const Observation& d_;
    const PosteriorSampler& s_;
    RngStream& rng_;
    double state_ = 0.0;
    bool started_ = false;
};

void check_m(std::size_t m) {
    if (m == 0) throw std::invalid_argument("estimator: M must be >= 1");
}

} // namespace

PosteriorSampler PosteriorSampler::markov(double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw std::domain_error("Markov sampler: rho must lie in [0, 1)");
    }
    return {Kind::Markov, rho};
}

std::string to_string(EstimatorKind k) {
    return k == EstimatorKind::PHat ? "p_hat" : "r_hat";
}

double estimate_p_hat(const GenerativeModel& model, const Observation& d, std::size_t m,
                      const PosteriorSampler& sampler, RngStream& rng) {
    check_m(m);
    ThetaChain chain(model, d, sampler, rng);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double theta = chain.next();
        const Observation rep = model.sample_data(theta, rng);
        if (model.discrepancy(rep, theta) >= model.discrepancy(d, theta)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(m);
}

double estimate_r_hat(const GenerativeModel& model, const Observation& d, std::size_t m,
                      const PosteriorSampler& sampler, RngStream& rng) {
    check_m(m);
    ThetaChain chain(model, d, sampler, rng);
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += model.conditional_sf(chain.next(), d);
    return sum / static_cast<double>(m);
}

EmpiricalSample marginal_estimator_run(const GenerativeModel& model, std::size_t m,
                                       const PosteriorSampler& sampler, EstimatorKind kind,
                                       std::size_t n_outer, const RngStream& rng) {
    check_m(m);
    if (n_outer == 0) throw std::invalid_argument("marginal_estimator_run: n_outer must be >= 1");
    std::vector<double> out(n_outer);
    const std::size_t blocks = (n_outer + kReplicateBlock - 1) / kReplicateBlock;
    for_each_block(blocks, [&](std::size_t b) {
        RngStream r = rng.split(b);
        const std::size_t end = std::min(n_outer, (b + 1) * kReplicateBlock);
        for (std::size_t i = b * kReplicateBlock; i < end; ++i) {
            const double theta = model.sample_theta(r);
            const Observation d = model.sample_data(theta, r);
            out[i] = kind == EstimatorKind::PHat ? estimate_p_hat(model, d, m, sampler, r)
                                                 : estimate_r_hat(model, d, m, sampler, r);
        }
    });
    return EmpiricalSample(std::move(out));
}

} // namespace ppp
