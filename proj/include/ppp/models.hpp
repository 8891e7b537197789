#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ppp/numerics.hpp"
#include "ppp/rng.hpp"

namespace ppp {

// One dataset D. `value` is the scalar observation; `component` carries a
// discrete label for models whose data has one (0 otherwise).
struct Observation {
    double value = 0.0;
    std::size_t component = 0;
};

struct ThetaMass {
    double theta;
    double mass;
};

// Joint model of (theta, D) with a discrepancy f(D, theta) and the exact
// conditional survival Q = P{f(D*, theta) >= f(D, theta) | theta, D}.
class GenerativeModel {
  public:
    virtual ~GenerativeModel() = default;

    virtual std::string id() const = 0;
    virtual double sample_theta(RngStream& rng) const = 0;
    virtual Observation sample_data(double theta, RngStream& rng) const = 0;
    // Finite posterior support; empty when the posterior is continuous.
    virtual std::vector<ThetaMass> posterior(const Observation& d) const = 0;
    // One posterior draw. The default inverts posterior(d).
    virtual double sample_posterior(const Observation& d, RngStream& rng) const;
    virtual double discrepancy(const Observation& d, double theta) const = 0;
    virtual double conditional_sf(double theta, const Observation& d) const = 0;
    // P = E(Q | D). The default sums posterior(d) against conditional_sf.
    virtual double exact_ppp(const Observation& d) const;
};

// Survival function G(t) = (1 - t)^k of the distance travelled, k in {1, 2, 3}.
struct LassoSurvival {
    int k = 1;
    double sf(double t) const;
    double density(double t) const;
    // Distance with survival G, from u in (0, 1].
    double distance_from(double u) const;
};

// Particle on a stem of length 1 - 2 alpha followed by a loop of length
// 2 alpha. theta = 1 travels clockwise, theta = 0 anti-clockwise; the
// position x is recorded clockwise and the discrepancy is the distance
// travelled along the path theta.
class LassoModel final : public GenerativeModel {
  public:
    LassoModel(double alpha, LassoSurvival g);

    double alpha() const { return alpha_; }
    const LassoSurvival& survival() const { return g_; }

    std::string id() const override;
    double sample_theta(RngStream& rng) const override;
    Observation sample_data(double theta, RngStream& rng) const override;
    std::vector<ThetaMass> posterior(const Observation& d) const override;
    double discrepancy(const Observation& d, double theta) const override;
    double conditional_sf(double theta, const Observation& d) const override;

  private:
    double alpha_;
    LassoSurvival g_;
};

// Two-component model on the unit interval: x | theta=0 ~ U[0, 1/2 + delta),
// x | theta=1 ~ U(1/2 - delta, 1], equal prior, f(x, theta) = |x - theta|.
// The p-value law has an atom at 2 delta / (1 + 2 delta) of twice that mass.
class SimplexModel final : public GenerativeModel {
  public:
    explicit SimplexModel(double delta, std::string id = "");

    double delta() const { return delta_; }
    // Location of the atom of the p-value law.
    double atom() const { return 2.0 * delta_ / (1.0 + 2.0 * delta_); }

    std::string id() const override { return id_; }
    double sample_theta(RngStream& rng) const override;
    Observation sample_data(double theta, RngStream& rng) const override;
    std::vector<ThetaMass> posterior(const Observation& d) const override;
    double discrepancy(const Observation& d, double theta) const override;
    double conditional_sf(double theta, const Observation& d) const override;

  private:
    double delta_;
    std::string id_;
};

// Port model. Row theta of `pmfs` is the port distribution h(., theta).
// Q(theta, pi) = sum_j h(j, theta) 1{h(j, theta) <= h(pi, theta)}.
struct PortPosterior {
    enum class Kind { Fixed, Bayes };
    Kind kind = Kind::Fixed;
    // Fixed: posterior weights used for every observation.
    std::vector<double> weights;
};

class PortModel final : public GenerativeModel {
  public:
    // Throws std::invalid_argument unless every row is a pmf of the same
    // length and prior / fixed weights are pmfs over the rows. An empty
    // prior means uniform; empty fixed weights mean the prior.
    PortModel(std::vector<std::vector<double>> pmfs, std::vector<double> prior,
              PortPosterior posterior);

    std::size_t apps() const { return h_.size(); }
    std::size_t ports() const { return h_.front().size(); }
    const std::vector<std::vector<double>>& pmfs() const { return h_; }
    const std::vector<double>& prior() const { return prior_; }

    std::string id() const override { return "port"; }
    double sample_theta(RngStream& rng) const override;
    Observation sample_data(double theta, RngStream& rng) const override;
    std::vector<ThetaMass> posterior(const Observation& d) const override;
    double discrepancy(const Observation& d, double theta) const override;
    double conditional_sf(double theta, const Observation& d) const override;

  private:
    std::vector<std::vector<double>> h_;
    std::vector<double> prior_;
    PortPosterior post_;
};

// Throws std::domain_error unless 0 < alpha < 1/2.
std::unique_ptr<LassoModel> lasso_model(double alpha, LassoSurvival g = {});
// Overlap chosen so that the p-value law is exactly P_{2 alpha}.
std::unique_ptr<SimplexModel> simplex_model(double alpha);
// Overlap half-width taken to be alpha itself.
std::unique_ptr<SimplexModel> simplex_model_literal(double alpha);
std::unique_ptr<PortModel> port_model(std::vector<std::vector<double>> pmfs,
                                      PortPosterior posterior = {});

// n draws of (U0 + U1) / 2 with U1 = U0 1(U0 >= 2 alpha) + (2 alpha - U0) 1(U0 < 2 alpha).
double ruschendorf_draw(double alpha, double u0);
std::vector<double> ruschendorf_values(double alpha, RngStream& rng, std::size_t n);
EmpiricalSample ruschendorf_sample(double alpha, RngStream& rng, std::size_t n);

// Realized p-values from n independent (theta, D) replicates.
struct FrequencyRun {
    std::string model_id;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::size_t n = 0;
    std::vector<double> values; // replicate order
    EmpiricalSample sample() const { return EmpiricalSample(values); }
};

// Replicates are split into fixed blocks, each with its own child stream,
// so the output is identical for any worker count.
FrequencyRun frequency_run(const GenerativeModel& model, std::size_t n, const RngStream& rng);

inline constexpr std::size_t kReplicateBlock = 4096;

// Values within this distance of a threshold count as at the threshold when
// tail probabilities are reported. Atoms computed in floating point land
// within a few ulps of their exact location.
inline constexpr double kTieTolerance = 1e-12;

struct RunSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    std::vector<double> tail_alphas;  // 0.01, 0.05, 0.1, 0.25
    std::vector<double> tail_probs;   // P(P <= alpha + kTieTolerance)
    std::vector<double> ecdf_grid;    // 512 points on [0, 1]
    std::vector<double> ecdf_values;
    // sup over [0, 1] of phi_emp(x) - x^2 / 2 (positive means a violation).
    double max_idf_excess = 0.0;
};

RunSummary summarize(const EmpiricalSample& sample);

// Fraction of values <= x + kTieTolerance.
double tail_probability(const EmpiricalSample& sample, double x);

} // namespace ppp
