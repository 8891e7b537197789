#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "ppp/idf.hpp"
#include "ppp/numerics.hpp"
#include "ppp/rng.hpp"

namespace ppp {

struct Atom {
    double location;
    double mass;
};

struct UniformPiece {
    double lo;
    double hi;
    double mass;
};

struct Uniform01 {};
struct Beta22 {};
struct PointMassUniformMixture {
    std::vector<Atom> atoms;
    std::vector<UniformPiece> uniform_pieces;
};

// A law on [0, 1]: the uniform, Beta(2,2), or a mixture of point masses and
// uniform pieces. Construction checks total mass only; sub-uniformity is a
// separate question answered by is_sub_uniform().
class SubUniformDist {
  public:
    using Variant = std::variant<Uniform01, Beta22, PointMassUniformMixture>;

    SubUniformDist() : v_(Uniform01{}) {}
    SubUniformDist(Uniform01 u) : v_(u) {}
    SubUniformDist(Beta22 b) : v_(b) {}
    // Drops zero-mass components and degenerate pieces; throws
    // std::invalid_argument on negative masses, locations outside [0, 1],
    // or total mass different from 1.
    explicit SubUniformDist(PointMassUniformMixture mixture);

    const Variant& variant() const { return v_; }
    const PointMassUniformMixture* mixture() const {
        return std::get_if<PointMassUniformMixture>(&v_);
    }

    double mean() const;
    double variance() const;
    double cdf(double x) const;
    // Left limit F(x-).
    double cdf_left(double x) const;
    // Generalized inverse inf{x : F(x) >= u}; atoms are returned verbatim.
    double quantile(double u) const;
    double sample_one(RngStream& rng) const;

    std::string describe() const;

  private:
    Variant v_;
    // CDF knots of a mixture, in IntegratedDF piecewise layout.
    std::vector<double> knot_x_;
    std::vector<double> knot_f_;
    std::vector<double> knot_fl_;
};

// Point mass 2*alpha at alpha plus uniform mass 1 - 2*alpha on [2*alpha, 1].
// Throws std::domain_error unless 0 < alpha <= 1/2.
SubUniformDist p2alpha(double alpha);

double cdf(const SubUniformDist& dist, double x);
EmpiricalSample sample(const SubUniformDist& dist, RngStream& rng, std::size_t n);
std::vector<double> sample_values(const SubUniformDist& dist, RngStream& rng, std::size_t n);
IntegratedDF idf_of(const SubUniformDist& dist);

struct SubUniformCheck {
    bool sub_uniform = false;
    DominanceResult dominance;
    double mean = 0.0;
};

SubUniformCheck is_sub_uniform(const SubUniformDist& dist, double tol = 1e-9);

// Compares a realized sample against a law with atoms: the observed
// frequency near each atom, and the KS distance between the remaining values
// and the law's continuous part renormalized to mass 1.
struct AtomFit {
    double location;
    double expected;
    double observed;
};
struct MixedFit {
    std::vector<AtomFit> atoms;
    double continuous_ks = 0.0;
    double continuous_mass = 0.0;
    std::size_t continuous_count = 0;
    double max_atom_error() const;
};
MixedFit mixed_fit(const EmpiricalSample& sample, const SubUniformDist& dist,
                   double atom_tol = 1e-9);

struct NamedDist {
    std::string name;
    SubUniformDist dist;
};

// The sub-uniform laws shipped with the library, used by the property and
// acceptance suites.
std::vector<NamedDist> builtin_sub_uniform();

} // namespace ppp
