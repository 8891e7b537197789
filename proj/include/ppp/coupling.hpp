#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppp/distributions.hpp"
#include "ppp/idf.hpp"
#include "ppp/models.hpp"
#include "ppp/rng.hpp"

namespace ppp {

// Thrown when a convex-order precondition fails. witness() is a point where
// phi_lower exceeds phi_upper, or the right end of the support when only the
// means differ.
class ConvexOrderError : public std::domain_error {
  public:
    ConvexOrderError(const std::string& what, double witness, double violation)
        : std::domain_error(what), witness_(witness), violation_(violation) {}
    double witness() const { return witness_; }
    double violation() const { return violation_; }

  private:
    double witness_;
    double violation_;
};

// Finitely supported measure with strictly increasing locations.
struct DiscreteMeasure {
    std::vector<double> x;
    std::vector<double> w;

    // Sorts, merges equal locations and drops zero masses.
    static DiscreteMeasure from_atoms(std::vector<Atom> atoms);
    double total() const;
    double mean() const;
    std::size_t size() const { return x.size(); }
};

IntegratedDF idf_of(const DiscreteMeasure& m);

// ------------------------------------------------------------ continuize

// One component (lo, hi) of {phi_mu < phi_nu}, with its interpolation
// points lo = points.front() < ... < points.back() = hi.
struct InterpolationInterval {
    double lo;
    double hi;
    std::vector<double> points;
};

// Atom `atom` of mass `mass` smoothed to the uniform law on [lo, hi];
// lo == hi means the atom is left in place.
struct KernelPiece {
    double atom;
    double mass;
    double lo;
    double hi;
    bool singular() const { return lo == hi; }
};

struct ContinuizeResult {
    std::vector<InterpolationInterval> intervals;
    std::vector<KernelPiece> kernels; // one per atom of mu, in order
    PointMassUniformMixture mu_tilde;
};

// Smooths the atoms of mu inside {phi_mu < phi_nu} with centered uniform
// kernels that stay between consecutive interpolation points, so that
// phi_mu <= phi_mu_tilde <= phi_nu. Throws ConvexOrderError unless mu <=_cx nu.
ContinuizeResult continuize(const DiscreteMeasure& mu, const IntegratedDF& nu, double beta = 0.5);

// ------------------------------------------------------------- transport

struct TransportEntry {
    std::size_t source;
    std::size_t dest;
    double mass;
};

// Sparse joint mass matrix between two discrete measures.
struct TransportPlan {
    DiscreteMeasure source;
    DiscreteMeasure dest;
    std::vector<TransportEntry> entries;

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
    std::vector<double> row_means() const;
    // max |row sum - source mass| and |col sum - dest mass|.
    double max_marginal_error() const;
    // max |row mean - source location|.
    double max_mean_error() const;
};

// A martingale plan (row means equal source locations) built by
// Chacon-Walsh balayage: for each linear piece L of phi_dest, the mass
// where L > phi_current is swept to the two ends of that set. Throws
// ConvexOrderError when source is not below dest in convex order.
TransportPlan martingale_transport(const DiscreteMeasure& source, const DiscreteMeasure& dest);

// ------------------------------------------------------------- couplings

// Law of S given P = p: a point mass at p, or a piecewise-uniform law with
// a continuous CDF.
class PointLaw {
  public:
    static PointLaw singular(double p);
    // Cells must be sorted and non-overlapping; masses are renormalized.
    static PointLaw piecewise_uniform(double p, std::vector<UniformPiece> cells);
    // Cells used exactly as given; masses must already sum to 1 (within 1e-9).
    static PointLaw from_table(double p, std::vector<UniformPiece> cells);

    bool is_singular() const { return cells_.empty(); }
    double p() const { return p_; }
    const std::vector<UniformPiece>& cells() const { return cells_; }
    double support_lo() const;
    double support_hi() const;

    double mean() const;
    double cdf(double s) const;
    // inf{s : F(s) >= u}.
    double quantile(double u) const;

  private:
    double p_ = 0.0;
    std::vector<UniformPiece> cells_;
    std::vector<double> cum_; // cumulative mass at the end of each cell
};

struct CouplingAtom {
    double mass;
    PointLaw law;
};

// Joint law of (P, S): atoms of P with their conditional laws, plus a
// continuous part of P on which S = P.
struct ConditionalLaw {
    std::vector<CouplingAtom> atoms;
    std::vector<UniformPiece> diagonal;

    // max over atoms of |E(S | P = p) - p|.
    double martingale_residual() const;
    bool all_singular() const;
};

inline constexpr std::size_t kDiagonal = std::numeric_limits<std::size_t>::max();

struct CouplingDraw {
    double p;
    double s;
    std::size_t component; // atom index, or kDiagonal
};

CouplingDraw sample_coupling(const ConditionalLaw& law, RngStream& rng);

// S | P = alpha uniform on [0, 2 alpha]; S = P on [2 alpha, 1].
// Throws std::domain_error unless 0 < alpha <= 1/2.
ConditionalLaw explicit_p2alpha_coupling(double alpha);

// Continuous CDF on the real line with closed-form inverse.
struct NamedCdf {
    enum class Kind { Logistic };
    Kind kind = Kind::Logistic;
    std::string name() const;
    double cdf(double t) const;
    double quantile(double u) const;
};

NamedCdf logistic_cdf();
// Throws std::invalid_argument for unknown names.
NamedCdf named_cdf(const std::string& name);

// F^{-1}[{F(s) + shift} mod 1] for the law's CDF F, with 1 mod 1 = 0.
// Returns s for singular laws. Throws std::domain_error if s lies outside
// the law's support.
double mod1_shift(const PointLaw& law, double shift, double s);
double mod1_family(const PointLaw& law, const NamedCdf& g, double t, double s);

// ------------------------------------------------------------- synthesis

struct SynthesisOptions {
    std::size_t target_cells = 256;  // cells used to discretize a continuous target
    std::size_t kernel_splits = 8;   // sub-atoms per smoothing kernel
    std::size_t dest_cells = 1024;   // uniform grid for S
    double beta = 0.5;
};

// Atoms of the target plus one atom per cell [k/C, (k+1)/C] at the
// conditional mean of the continuous part. `ks_error` receives the exact
// KS distance between the result and the target.
DiscreteMeasure discretize_target(const SubUniformDist& target, std::size_t cells,
                                  double* ks_error = nullptr);

struct SynthesisReport {
    std::string method; // "singular", "explicit_p2alpha" or "transport"
    double discretization_ks = 0.0;
    // Fraction of the continuized kernel width kept in the transport source.
    double kernel_scale = 0.0;
    double martingale_residual = 0.0;
    std::size_t atoms = 0;
};

// D = (S, component of P); theta ~ G; f(D, t) = -ln U_t with
// U_t = F^{-1}_{S|P}[{F_{S|P}(S) + G(t)} mod 1], so that the posterior
// predictive p-value of D is E(S | P) = P.
class SyntheticPPPModel final : public GenerativeModel {
  public:
    SyntheticPPPModel(SubUniformDist target, ConditionalLaw coupling, NamedCdf g,
                      std::uint64_t seed, SynthesisReport report);

    const SubUniformDist& target() const { return target_; }
    const ConditionalLaw& coupling() const { return coupling_; }
    const NamedCdf& g() const { return g_; }
    std::uint64_t seed() const { return seed_; }
    const SynthesisReport& report() const { return report_; }

    // U_t for dataset d.
    double u_t(const Observation& d, double t) const;

    std::string id() const override;
    double sample_theta(RngStream& rng) const override;
    Observation sample_data(double theta, RngStream& rng) const override;
    std::vector<ThetaMass> posterior(const Observation& d) const override;
    double sample_posterior(const Observation& d, RngStream& rng) const override;
    double discrepancy(const Observation& d, double theta) const override;
    double conditional_sf(double theta, const Observation& d) const override;
    double exact_ppp(const Observation& d) const override;

  private:
    SubUniformDist target_;
    ConditionalLaw coupling_;
    NamedCdf g_;
    std::uint64_t seed_;
    SynthesisReport report_;
};

// Builds a model whose posterior predictive p-value has law `target`
// (exactly for the uniform and P_{2 alpha} laws, up to the reported
// discretization error otherwise). Throws ConvexOrderError when the target
// is not sub-uniform.
SyntheticPPPModel synthesize_ppp(const SubUniformDist& target, const NamedCdf& g,
                                 const RngStream& rng, const SynthesisOptions& opt = {});

} // namespace ppp
