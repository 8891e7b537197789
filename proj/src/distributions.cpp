#include "ppp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ppp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double piece_fraction(const UniformPiece& p, double x) {
    if (x <= p.lo) return 0.0;
    if (x >= p.hi) return 1.0;
    return (x - p.lo) / (p.hi - p.lo);
}

double mixture_cdf(const PointMassUniformMixture& m, double x, bool left_limit) {
    double f = 0.0;
    for (const auto& a : m.atoms) {
        if (left_limit ? a.location < x : a.location <= x) f += a.mass;
    }
    for (const auto& p : m.uniform_pieces) f += p.mass * piece_fraction(p, x);
    return std::min(f, 1.0);
}

} // namespace

SubUniformDist::SubUniformDist(PointMassUniformMixture mixture) {
    PointMassUniformMixture clean;
    double total = 0.0;
    for (const auto& a : mixture.atoms) {
        if (!(a.mass >= 0.0) || !(a.location >= 0.0 && a.location <= 1.0)) {
            throw std::invalid_argument("mixture atom must have mass >= 0 and location in [0, 1]");
        }
        if (a.mass > 0.0) clean.atoms.push_back(a);
        total += a.mass;
    }
    for (const auto& p : mixture.uniform_pieces) {
        if (!(p.mass >= 0.0) || !(p.lo >= 0.0 && p.hi <= 1.0 && p.lo <= p.hi)) {
            throw std::invalid_argument("mixture piece must have mass >= 0 and 0 <= lo <= hi <= 1");
        }
        total += p.mass;
        if (p.mass == 0.0) continue;
        if (p.hi == p.lo) {
            clean.atoms.push_back({p.lo, p.mass});
        } else {
            clean.uniform_pieces.push_back(p);
        }
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("mixture masses must sum to 1");
    }
    std::sort(clean.atoms.begin(), clean.atoms.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });

    std::vector<double> knots;
    for (const auto& a : clean.atoms) knots.push_back(a.location);
    for (const auto& p : clean.uniform_pieces) {
        knots.push_back(p.lo);
        knots.push_back(p.hi);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    for (double x : knots) {
        knot_x_.push_back(x);
        knot_f_.push_back(mixture_cdf(clean, x, false));
        knot_fl_.push_back(mixture_cdf(clean, x, true));
    }
    knot_f_.back() = 1.0;
    v_ = std::move(clean);
}

double SubUniformDist::mean() const {
    return std::visit(overloaded{[](const Uniform01&) { return 0.5; },
                                 [](const Beta22&) { return 0.5; },
                                 [](const PointMassUniformMixture& m) {
                                     double s = 0.0;
                                     for (const auto& a : m.atoms) s += a.mass * a.location;
                                     for (const auto& p : m.uniform_pieces) {
                                         s += p.mass * 0.5 * (p.lo + p.hi);
                                     }
                                     return s;
                                 }},
                      v_);
}

double SubUniformDist::variance() const {
    const double mu = mean();
    return std::visit(
        overloaded{[](const Uniform01&) { return 1.0 / 12.0; },
                   [](const Beta22&) { return 1.0 / 20.0; },
                   [mu](const PointMassUniformMixture& m) {
                       double s = 0.0;
                       for (const auto& a : m.atoms) s += a.mass * a.location * a.location;
                       for (const auto& p : m.uniform_pieces) {
                           s += p.mass * (p.lo * p.lo + p.lo * p.hi + p.hi * p.hi) / 3.0;
                       }
                       return s - mu * mu;
                   }},
        v_);
}

double SubUniformDist::cdf(double x) const {
    return std::visit(overloaded{[x](const Uniform01&) { return std::clamp(x, 0.0, 1.0); },
                                 [x](const Beta22&) {
                                     const double c = std::clamp(x, 0.0, 1.0);
                                     return c * c * (3.0 - 2.0 * c);
                                 },
                                 [x](const PointMassUniformMixture& m) {
                                     return mixture_cdf(m, x, false);
                                 }},
                      v_);
}

double SubUniformDist::cdf_left(double x) const {
    if (const auto* m = mixture()) return mixture_cdf(*m, x, true);
    return cdf(x);
}

double SubUniformDist::quantile(double u) const {
    if (std::holds_alternative<Uniform01>(v_)) return std::clamp(u, 0.0, 1.0);
    if (std::holds_alternative<Beta22>(v_)) {
        // Closed-form inverse of 3x^2 - 2x^3.
        const double c = std::clamp(u, 0.0, 1.0);
        return 0.5 + std::sin(std::asin(2.0 * c - 1.0) / 3.0);
    }
    const auto it = std::lower_bound(knot_f_.begin(), knot_f_.end(), u);
    const std::size_t i =
        it == knot_f_.end() ? knot_f_.size() - 1 : static_cast<std::size_t>(it - knot_f_.begin());
    if (i == 0 || u > knot_fl_[i]) return knot_x_[i];
    const double f0 = knot_f_[i - 1];
    const double f1 = knot_fl_[i];
    if (f1 <= f0) return knot_x_[i];
    const double t = (u - f0) / (f1 - f0);
    return knot_x_[i - 1] + t * (knot_x_[i] - knot_x_[i - 1]);
}

double SubUniformDist::sample_one(RngStream& rng) const {
    return quantile(rng.uniform());
}

std::string SubUniformDist::describe() const {
    std::ostringstream os;
    std::visit(overloaded{[&](const Uniform01&) { os << "uniform"; },
                          [&](const Beta22&) { os << "beta22"; },
                          [&](const PointMassUniformMixture& m) {
                              os << "mixture(";
                              for (const auto& a : m.atoms) {
                                  os << "atom " << a.location << ":" << a.mass << " ";
                              }
                              for (const auto& p : m.uniform_pieces) {
                                  os << "uniform[" << p.lo << "," << p.hi << "]:" << p.mass
                                     << " ";
                              }
                              os << ")";
                          }},
               v_);
    return os.str();
}

SubUniformDist p2alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 0.5)) {
        throw std::domain_error("p2alpha: alpha must lie in (0, 1/2]");
    }
    PointMassUniformMixture m;
    m.atoms.push_back({alpha, 2.0 * alpha});
    if (alpha < 0.5) m.uniform_pieces.push_back({2.0 * alpha, 1.0, 1.0 - 2.0 * alpha});
    return SubUniformDist(std::move(m));
}

double cdf(const SubUniformDist& dist, double x) {
    return dist.cdf(x);
}

std::vector<double> sample_values(const SubUniformDist& dist, RngStream& rng, std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = dist.sample_one(rng);
    return out;
}

EmpiricalSample sample(const SubUniformDist& dist, RngStream& rng, std::size_t n) {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    return EmpiricalSample(sample_values(dist, rng, n));
}

IntegratedDF idf_of(const SubUniformDist& dist) {
    if (std::holds_alternative<Uniform01>(dist.variant())) {
        return IntegratedDF::analytic(AnalyticFamily::Uniform01);
    }
    if (std::holds_alternative<Beta22>(dist.variant())) {
        return IntegratedDF::analytic(AnalyticFamily::Beta22);
    }
    const auto& m = *dist.mixture();
    std::vector<double> x;
    std::vector<double> f;
    std::vector<double> fl;
    for (const auto& a : m.atoms) x.push_back(a.location);
    for (const auto& p : m.uniform_pieces) {
        x.push_back(p.lo);
        x.push_back(p.hi);
    }
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    for (double k : x) {
        f.push_back(dist.cdf(k));
        fl.push_back(dist.cdf_left(k));
    }
    f.back() = 1.0;
    return IntegratedDF::piecewise(std::move(x), std::move(f), std::move(fl));
}

SubUniformCheck is_sub_uniform(const SubUniformDist& dist, double tol) {
    SubUniformCheck check;
    check.dominance = dominates_cx(idf_of(dist), IntegratedDF::uniform(), tol);
    check.mean = dist.mean();
    check.sub_uniform = check.dominance.holds && std::abs(check.mean - 0.5) <= tol;
    return check;
}

double MixedFit::max_atom_error() const {
    double worst = 0.0;
    for (const auto& a : atoms) worst = std::max(worst, std::abs(a.observed - a.expected));
    return worst;
}

MixedFit mixed_fit(const EmpiricalSample& sample, const SubUniformDist& dist, double atom_tol) {
    MixedFit fit;
    std::vector<Atom> atoms;
    if (const auto* m = dist.mixture()) atoms = m->atoms;
    for (const auto& a : atoms) {
        fit.atoms.push_back({a.location, a.mass, sample.fraction_near(a.location, atom_tol)});
    }

    double atom_mass = 0.0;
    for (const auto& a : atoms) atom_mass += a.mass;
    fit.continuous_mass = 1.0 - atom_mass;

    std::vector<double> rest;
    for (double v : sample.values()) {
        const bool at_atom = std::any_of(atoms.begin(), atoms.end(), [&](const Atom& a) {
            return std::abs(v - a.location) <= atom_tol;
        });
        if (!at_atom) rest.push_back(v);
    }
    fit.continuous_count = rest.size();
    if (fit.continuous_mass <= 1e-12) {
        fit.continuous_ks = rest.empty() ? 0.0 : 1.0;
        return fit;
    }
    if (rest.empty()) {
        fit.continuous_ks = 1.0;
        return fit;
    }
    const double mass = fit.continuous_mass;
    auto continuous_cdf = [&](double x) {
        double jumps = 0.0;
        for (const auto& a : atoms) {
            if (a.location <= x) jumps += a.mass;
        }
        return std::clamp((dist.cdf(x) - jumps) / mass, 0.0, 1.0);
    };
    fit.continuous_ks = ks_statistic(EmpiricalSample(std::move(rest)), continuous_cdf);
    return fit;
}

std::vector<NamedDist> builtin_sub_uniform() {
    std::vector<NamedDist> out;
    out.push_back({"uniform", SubUniformDist(Uniform01{})});
    out.push_back({"beta22", SubUniformDist(Beta22{})});
    for (double a : {0.05, 0.1, 0.25}) {
        std::ostringstream name;
        name << "p2alpha_" << a;
        out.push_back({name.str(), p2alpha(a)});
    }
    out.push_back({"point_half", p2alpha(0.5)});
    out.push_back({"two_atoms",
                   SubUniformDist(PointMassUniformMixture{{{0.25, 0.5}, {0.75, 0.5}}, {}})});
    out.push_back({"half_atom_half_uniform",
                   SubUniformDist(PointMassUniformMixture{{{0.5, 0.5}}, {{0.0, 1.0, 0.5}}})});
    return out;
}

} // namespace ppp
