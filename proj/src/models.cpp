#include "ppp/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ppp {

namespace {

std::size_t draw_index(const std::vector<double>& pmf, RngStream& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        if (pmf[i] <= 0.0) continue;
        cum += pmf[i];
        last = i;
        if (u < cum) return i;
    }
    return last;
}

void check_pmf(const std::vector<double>& pmf, const char* what) {
    if (pmf.empty()) throw std::invalid_argument(std::string(what) + ": empty pmf");
    double sum = 0.0;
    for (double v : pmf) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument(std::string(what) + ": pmf entries must lie in [0, 1]");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string(what) + ": pmf must sum to 1");
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

double GenerativeModel::sample_posterior(const Observation& d, RngStream& rng) const {
    const auto post = posterior(d);
    if (post.empty()) throw std::logic_error("sample_posterior: posterior has no finite support");
    std::vector<double> w;
    w.reserve(post.size());
    for (const auto& tm : post) w.push_back(tm.mass);
    return post[draw_index(w, rng)].theta;
}

double GenerativeModel::exact_ppp(const Observation& d) const {
    double p = 0.0;
    for (const auto& tm : posterior(d)) {
        if (tm.mass > 0.0) p += tm.mass * conditional_sf(tm.theta, d);
    }
    return std::min(1.0, p);
}

// ---------------------------------------------------------------- lasso

double LassoSurvival::sf(double t) const {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    return std::pow(1.0 - t, k);
}

double LassoSurvival::density(double t) const {
    if (t < 0.0 || t >= 1.0) return 0.0;
    return k * std::pow(1.0 - t, k - 1);
}

double LassoSurvival::distance_from(double u) const {
    return k == 1 ? 1.0 - u : 1.0 - std::pow(u, 1.0 / k);
}

LassoModel::LassoModel(double alpha, LassoSurvival g) : alpha_(alpha), g_(g) {
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw std::domain_error("lasso model: alpha must lie in (0, 1/2)");
    }
    if (g.k < 1) throw std::domain_error("lasso model: survival exponent must be >= 1");
}

std::string LassoModel::id() const {
    return "lasso(alpha=" + fmt(alpha_) + ",k=" + std::to_string(g_.k) + ")";
}

double LassoModel::sample_theta(RngStream& rng) const {
    return rng.uniform() < 0.5 ? 0.0 : 1.0;
}

Observation LassoModel::sample_data(double theta, RngStream& rng) const {
    const double dist = g_.distance_from(1.0 - rng.uniform());
    const double stem = 1.0 - 2.0 * alpha_;
    if (theta == 1.0 || dist <= stem) return {dist, 0};
    return {2.0 - 2.0 * alpha_ - dist, 0};
}

double LassoModel::discrepancy(const Observation& d, double theta) const {
    const double x = d.value;
    if (x <= 1.0 - 2.0 * alpha_ || theta == 1.0) return x;
    return 2.0 - 2.0 * alpha_ - x;
}

std::vector<ThetaMass> LassoModel::posterior(const Observation& d) const {
    const double w0 = g_.density(discrepancy(d, 0.0));
    const double w1 = g_.density(discrepancy(d, 1.0));
    if (w0 + w1 <= 0.0) return {{0.0, 0.5}, {1.0, 0.5}};
    return {{0.0, w0 / (w0 + w1)}, {1.0, w1 / (w0 + w1)}};
}

double LassoModel::conditional_sf(double theta, const Observation& d) const {
    return g_.sf(discrepancy(d, theta));
}

// -------------------------------------------------------------- simplex

SimplexModel::SimplexModel(double delta, std::string id) : delta_(delta), id_(std::move(id)) {
    if (!(delta > 0.0 && delta < 0.5)) {
        throw std::domain_error("simplex model: overlap half-width must lie in (0, 1/2)");
    }
    if (id_.empty()) id_ = "simplex(delta=" + fmt(delta) + ")";
}

double SimplexModel::sample_theta(RngStream& rng) const {
    return rng.uniform() < 0.5 ? 0.0 : 1.0;
}

Observation SimplexModel::sample_data(double theta, RngStream& rng) const {
    const double width = 0.5 + delta_;
    const double u = rng.uniform();
    return {theta == 0.0 ? u * width : 1.0 - u * width, 0};
}

std::vector<ThetaMass> SimplexModel::posterior(const Observation& d) const {
    const double x = d.value;
    // Both components have density 1 / (1/2 + delta) on their supports.
    const bool in0 = x >= 0.0 && x < 0.5 + delta_;
    const bool in1 = x > 0.5 - delta_ && x <= 1.0;
    if (in0 && in1) return {{0.0, 0.5}, {1.0, 0.5}};
    if (in0) return {{0.0, 1.0}, {1.0, 0.0}};
    if (in1) return {{0.0, 0.0}, {1.0, 1.0}};
    throw std::domain_error("simplex model: observation outside [0, 1]");
}

double SimplexModel::discrepancy(const Observation& d, double theta) const {
    return std::abs(d.value - theta);
}

double SimplexModel::conditional_sf(double theta, const Observation& d) const {
    const double width = 0.5 + delta_;
    const double x = d.value;
    const double q = theta == 0.0 ? (width - x) / width : (x - (0.5 - delta_)) / width;
    return std::clamp(q, 0.0, 1.0);
}

// ----------------------------------------------------------------- port

PortModel::PortModel(std::vector<std::vector<double>> pmfs, std::vector<double> prior,
                     PortPosterior posterior)
    : h_(std::move(pmfs)), prior_(std::move(prior)), post_(std::move(posterior)) {
    if (h_.empty()) throw std::invalid_argument("port model: no applications");
    for (const auto& row : h_) {
        check_pmf(row, "port model");
        if (row.size() != h_.front().size()) {
            throw std::invalid_argument("port model: pmfs differ in length");
        }
    }
    if (prior_.empty()) prior_.assign(h_.size(), 1.0 / static_cast<double>(h_.size()));
    if (prior_.size() != h_.size()) throw std::invalid_argument("port model: prior size mismatch");
    check_pmf(prior_, "port model prior");
    if (post_.kind == PortPosterior::Kind::Fixed) {
        if (post_.weights.empty()) post_.weights = prior_;
        if (post_.weights.size() != h_.size()) {
            throw std::invalid_argument("port model: posterior weight size mismatch");
        }
        check_pmf(post_.weights, "port model posterior");
    }
}

double PortModel::sample_theta(RngStream& rng) const {
    return static_cast<double>(draw_index(prior_, rng));
}

Observation PortModel::sample_data(double theta, RngStream& rng) const {
    const auto app = static_cast<std::size_t>(theta);
    const auto port = draw_index(h_.at(app), rng);
    return {static_cast<double>(port), port};
}

std::vector<ThetaMass> PortModel::posterior(const Observation& d) const {
    std::vector<ThetaMass> out(h_.size());
    if (post_.kind == PortPosterior::Kind::Fixed) {
        for (std::size_t t = 0; t < h_.size(); ++t) out[t] = {static_cast<double>(t), post_.weights[t]};
        return out;
    }
    const std::size_t port = d.component;
    double total = 0.0;
    for (std::size_t t = 0; t < h_.size(); ++t) total += prior_[t] * h_[t].at(port);
    if (total <= 0.0) throw std::domain_error("port model: observed port impossible under every app");
    for (std::size_t t = 0; t < h_.size(); ++t) {
        out[t] = {static_cast<double>(t), prior_[t] * h_[t][port] / total};
    }
    return out;
}

double PortModel::discrepancy(const Observation& d, double theta) const {
    return -h_.at(static_cast<std::size_t>(theta)).at(d.component);
}

double PortModel::conditional_sf(double theta, const Observation& d) const {
    const auto& h = h_.at(static_cast<std::size_t>(theta));
    const double at = h.at(d.component);
    double q = 0.0;
    for (double v : h) {
        if (v <= at) q += v;
    }
    return std::min(1.0, q);
}

// ------------------------------------------------------------ factories

std::unique_ptr<LassoModel> lasso_model(double alpha, LassoSurvival g) {
    return std::make_unique<LassoModel>(alpha, g);
}

std::unique_ptr<SimplexModel> simplex_model(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw std::domain_error("simplex model: alpha must lie in (0, 1/2)");
    }
    return std::make_unique<SimplexModel>(alpha / (2.0 * (1.0 - alpha)),
                                          "simplex(alpha=" + fmt(alpha) + ")");
}

std::unique_ptr<SimplexModel> simplex_model_literal(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw std::domain_error("simplex model: alpha must lie in (0, 1/2)");
    }
    return std::make_unique<SimplexModel>(alpha, "simplex_literal(alpha=" + fmt(alpha) + ")");
}

std::unique_ptr<PortModel> port_model(std::vector<std::vector<double>> pmfs,
                                      PortPosterior posterior) {
    return std::make_unique<PortModel>(std::move(pmfs), std::vector<double>{},
                                       std::move(posterior));
}

// ---------------------------------------------------------- ruschendorf

double ruschendorf_draw(double alpha, double u0) {
    if (u0 >= 2.0 * alpha) return u0;
    // (U0 + (2 alpha - U0)) / 2 is alpha; returned directly so the atom is exact.
    return alpha;
}

std::vector<double> ruschendorf_values(double alpha, RngStream& rng, std::size_t n) {
    if (!(alpha > 0.0 && alpha <= 0.5)) {
        throw std::domain_error("ruschendorf: alpha must lie in (0, 1/2]");
    }
    std::vector<double> out(n);
    for (auto& v : out) v = ruschendorf_draw(alpha, rng.uniform());
    return out;
}

EmpiricalSample ruschendorf_sample(double alpha, RngStream& rng, std::size_t n) {
    if (n == 0) throw std::invalid_argument("ruschendorf: n must be >= 1");
    return EmpiricalSample(ruschendorf_values(alpha, rng, n));
}

} // namespace ppp
