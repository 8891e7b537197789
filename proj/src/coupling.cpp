#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ppp/coupling.hpp"

namespace ppp {

// -------------------------------------------------------------- PointLaw

PointLaw PointLaw::singular(double p) {
    PointLaw law;
    law.p_ = p;
    return law;
}

PointLaw PointLaw::piecewise_uniform(double p, std::vector<UniformPiece> cells) {
    std::erase_if(cells, [](const UniformPiece& c) { return !(c.mass > 0.0); });
    if (cells.empty()) throw std::invalid_argument("point law: no cell carries mass");
    double total = 0.0;
    for (const auto& c : cells) total += c.mass;
    for (auto& c : cells) c.mass /= total;
    return from_table(p, std::move(cells));
}

PointLaw PointLaw::from_table(double p, std::vector<UniformPiece> cells) {
    std::erase_if(cells, [](const UniformPiece& c) { return !(c.mass > 0.0); });
    if (cells.empty()) throw std::invalid_argument("point law: no cell carries mass");
    std::sort(cells.begin(), cells.end(),
              [](const UniformPiece& a, const UniformPiece& b) { return a.lo < b.lo; });
    PointLaw law;
    law.p_ = p;
    double cum = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!(cells[i].hi > cells[i].lo)) throw std::invalid_argument("point law: empty cell");
        if (i > 0 && cells[i].lo < cells[i - 1].hi) {
            throw std::invalid_argument("point law: cells overlap");
        }
        cum += cells[i].mass;
        law.cum_.push_back(cum);
    }
    if (std::abs(cum - 1.0) > 1e-9) throw std::invalid_argument("point law: masses must sum to 1");
    law.cum_.back() = 1.0;
    law.cells_ = std::move(cells);
    return law;
}

double PointLaw::support_lo() const { return is_singular() ? p_ : cells_.front().lo; }
double PointLaw::support_hi() const { return is_singular() ? p_ : cells_.back().hi; }

double PointLaw::mean() const {
    if (is_singular()) return p_;
    double m = 0.0;
    for (const auto& c : cells_) m += c.mass * 0.5 * (c.lo + c.hi);
    return m;
}

double PointLaw::cdf(double s) const {
    if (is_singular()) return s >= p_ ? 1.0 : 0.0;
    double f = 0.0;
    for (const auto& c : cells_) {
        if (s >= c.hi) {
            f += c.mass;
        } else {
            if (s > c.lo) f += c.mass * (s - c.lo) / (c.hi - c.lo);
            break;
        }
    }
    return std::min(f, 1.0);
}

double PointLaw::quantile(double u) const {
    if (is_singular()) return p_;
    if (u <= 0.0) return cells_.front().lo;
    if (u >= 1.0) return cells_.back().hi;
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cum_.begin(), static_cast<std::ptrdiff_t>(cum_.size()) - 1));
    const auto& c = cells_[i];
    const double before = i == 0 ? 0.0 : cum_[i - 1];
    const double frac = std::clamp((u - before) / c.mass, 0.0, 1.0);
    return c.lo + frac * (c.hi - c.lo);
}

// -------------------------------------------------------- ConditionalLaw

double ConditionalLaw::martingale_residual() const {
    double worst = 0.0;
    for (const auto& a : atoms) worst = std::max(worst, std::abs(a.law.mean() - a.law.p()));
    return worst;
}

bool ConditionalLaw::all_singular() const {
    return std::all_of(atoms.begin(), atoms.end(),
                       [](const CouplingAtom& a) { return a.law.is_singular(); });
}

CouplingDraw sample_coupling(const ConditionalLaw& law, RngStream& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t i = 0; i < law.atoms.size(); ++i) {
        cum += law.atoms[i].mass;
        if (u < cum) {
            const auto& pl = law.atoms[i].law;
            return {pl.p(), pl.quantile(rng.uniform()), i};
        }
    }
    for (const auto& piece : law.diagonal) {
        cum += piece.mass;
        if (u < cum) {
            const double s = piece.lo + rng.uniform() * (piece.hi - piece.lo);
            return {s, s, kDiagonal};
        }
    }
    // Rounding left u above the last cumulative mass.
    if (!law.diagonal.empty()) {
        const double s = law.diagonal.back().hi;
        return {s, s, kDiagonal};
    }
    const auto& pl = law.atoms.back().law;
    return {pl.p(), pl.quantile(rng.uniform()), law.atoms.size() - 1};
}

ConditionalLaw explicit_p2alpha_coupling(double alpha) {
    if (!(alpha > 0.0 && alpha <= 0.5)) {
        throw std::domain_error("explicit coupling: alpha must lie in (0, 1/2]");
    }
    ConditionalLaw law;
    law.atoms.push_back({2.0 * alpha, PointLaw::piecewise_uniform(alpha, {{0.0, 2.0 * alpha, 1.0}})});
    if (alpha < 0.5) law.diagonal.push_back({2.0 * alpha, 1.0, 1.0 - 2.0 * alpha});
    return law;
}

// ------------------------------------------------------------- NamedCdf

std::string NamedCdf::name() const { return "logistic"; }

double NamedCdf::cdf(double t) const { return 1.0 / (1.0 + std::exp(-t)); }

double NamedCdf::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("logistic quantile: u must lie in (0, 1)");
    return std::log(u) - std::log1p(-u);
}

NamedCdf logistic_cdf() { return {}; }

NamedCdf named_cdf(const std::string& name) {
    if (name == "logistic") return logistic_cdf();
    throw std::invalid_argument("unknown CDF '" + name + "' (expected: logistic)");
}

double mod1_shift(const PointLaw& law, double shift, double s) {
    if (law.is_singular()) return s;
    const double eps = 1e-12;
    if (s < law.support_lo() - eps || s > law.support_hi() + eps) {
        throw std::domain_error("mod1_shift: s lies outside the conditional support");
    }
    double v = law.cdf(s) + shift;
    v -= std::floor(v);
    if (v >= 1.0) v = 0.0;
    return law.quantile(v);
}

double mod1_family(const PointLaw& law, const NamedCdf& g, double t, double s) {
    return mod1_shift(law, g.cdf(t), s);
}

// ------------------------------------------------------------ synthesis

DiscreteMeasure discretize_target(const SubUniformDist& target, std::size_t cells,
                                  double* ks_error) {
    if (cells == 0) throw std::invalid_argument("discretize_target: cells must be >= 1");
    std::vector<Atom> atoms;
    const double c = static_cast<double>(cells);
    // Mass and first moment of the continuous part on [lo, hi].
    auto continuous = [&](double lo, double hi) -> std::pair<double, double> {
        return std::visit(
            [&](const auto& v) -> std::pair<double, double> {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Uniform01>) {
                    return {hi - lo, 0.5 * (hi * hi - lo * lo)};
                } else if constexpr (std::is_same_v<T, Beta22>) {
                    auto f = [](double x) { return 3 * x * x - 2 * x * x * x; };
                    auto m = [](double x) { return 2 * x * x * x - 1.5 * x * x * x * x; };
                    return {f(hi) - f(lo), m(hi) - m(lo)};
                } else {
                    double mass = 0.0;
                    double moment = 0.0;
                    for (const auto& p : v.uniform_pieces) {
                        const double a = std::max(lo, p.lo);
                        const double b = std::min(hi, p.hi);
                        if (!(b > a)) continue;
                        const double w = p.mass * (b - a) / (p.hi - p.lo);
                        mass += w;
                        moment += w * 0.5 * (a + b);
                    }
                    return {mass, moment};
                }
            },
            target.variant());
    };
    if (const auto* m = target.mixture()) atoms = m->atoms;
    for (std::size_t k = 0; k < cells; ++k) {
        const double lo = static_cast<double>(k) / c;
        const double hi = static_cast<double>(k + 1) / c;
        const auto [mass, moment] = continuous(lo, hi);
        if (mass <= 0.0) continue;
        atoms.push_back({std::clamp(moment / mass, lo, hi), mass});
    }
    DiscreteMeasure out = DiscreteMeasure::from_atoms(std::move(atoms));

    if (ks_error != nullptr) {
        // Both CDFs are monotone and the discrete one is flat between the
        // probe points, so the sup is attained at a probe or its left limit.
        std::vector<double> probes(out.x);
        for (std::size_t k = 0; k <= cells; ++k) probes.push_back(static_cast<double>(k) / c);
        std::vector<double> cum(out.size());
        double run = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) cum[i] = run += out.w[i];
        auto disc = [&](double x, bool left) {
            const auto it = left ? std::lower_bound(out.x.begin(), out.x.end(), x)
                                 : std::upper_bound(out.x.begin(), out.x.end(), x);
            return it == out.x.begin() ? 0.0 : cum[static_cast<std::size_t>(it - out.x.begin()) - 1];
        };
        double worst = 0.0;
        for (double x : probes) {
            worst = std::max(worst, std::abs(disc(x, false) - target.cdf(x)));
            worst = std::max(worst, std::abs(disc(x, true) - target.cdf_left(x)));
        }
        *ks_error = worst;
    }
    return out;
}

namespace {

constexpr std::size_t kMaxTargetAtoms = 512;

bool is_p2alpha_form(const SubUniformDist& target, double* alpha) {
    const auto* m = target.mixture();
    if (m == nullptr || m->atoms.size() != 1) return false;
    const double a = m->atoms[0].location;
    if (!(a > 0.0 && a <= 0.5) || std::abs(m->atoms[0].mass - 2.0 * a) > 1e-12) return false;
    if (m->uniform_pieces.empty()) {
        if (std::abs(a - 0.5) > 1e-12) return false;
    } else {
        if (m->uniform_pieces.size() != 1) return false;
        const auto& p = m->uniform_pieces[0];
        if (std::abs(p.lo - 2.0 * a) > 1e-12 || p.hi != 1.0) return false;
    }
    *alpha = a;
    return true;
}

ConditionalLaw transport_coupling(const SubUniformDist& target, const SynthesisOptions& opt,
                                  SynthesisReport& report) {
    const DiscreteMeasure disc = discretize_target(target, opt.target_cells, &report.discretization_ks);
    if (disc.size() > kMaxTargetAtoms) {
        throw std::invalid_argument("synthesize_ppp: discretized target exceeds 512 atoms");
    }
    const ContinuizeResult cont = continuize(disc, IntegratedDF::uniform(), opt.beta);

    const std::size_t n = opt.dest_cells;
    DiscreteMeasure dest;
    for (std::size_t k = 0; k < n; ++k) {
        dest.x.push_back((2.0 * static_cast<double>(k) + 1.0) / (2.0 * static_cast<double>(n)));
        dest.w.push_back(1.0 / static_cast<double>(n));
    }

    // Sub-atoms of each kernel, narrowed until the source fits under the grid.
    for (double scale : {1.0, 0.5, 0.25, 0.125, 0.0}) {
        struct Sub {
            std::size_t kernel;
            double x;
            double mass;
        };
        std::vector<Sub> subs;
        for (std::size_t i = 0; i < cont.kernels.size(); ++i) {
            const auto& k = cont.kernels[i];
            const double half = 0.5 * scale * (k.hi - k.lo);
            if (half <= 0.0 || opt.kernel_splits <= 1) {
                subs.push_back({i, k.atom, k.mass});
                continue;
            }
            const double ks = static_cast<double>(opt.kernel_splits);
            for (std::size_t j = 0; j < opt.kernel_splits; ++j) {
                const double x = k.atom - half + (2.0 * static_cast<double>(j) + 1.0) * half / ks;
                subs.push_back({i, x, k.mass / ks});
            }
        }
        std::vector<Atom> atoms;
        for (const auto& s : subs) atoms.push_back({s.x, s.mass});
        const DiscreteMeasure source = DiscreteMeasure::from_atoms(std::move(atoms));

        TransportPlan plan;
        try {
            plan = martingale_transport(source, dest);
        } catch (const ConvexOrderError&) {
            if (scale == 0.0) throw;
            continue;
        }
        report.kernel_scale = scale;

        // Row laws, shared among sub-atoms that landed on the same location.
        std::vector<std::vector<std::pair<std::size_t, double>>> rows(source.size());
        for (const auto& e : plan.entries) rows[e.source].emplace_back(e.dest, e.mass);
        std::vector<std::vector<double>> cell_mass(cont.kernels.size());
        for (const auto& s : subs) {
            const auto r = static_cast<std::size_t>(
                std::lower_bound(source.x.begin(), source.x.end(), s.x) - source.x.begin());
            const double share = s.mass / source.w[r];
            auto& cm = cell_mass[s.kernel];
            if (cm.empty()) cm.assign(n, 0.0);
            for (const auto& [j, mass] : rows[r]) cm[j] += share * mass;
        }
        ConditionalLaw law;
        for (std::size_t i = 0; i < cont.kernels.size(); ++i) {
            std::vector<UniformPiece> cells;
            for (std::size_t j = 0; j < n; ++j) {
                if (cell_mass[i][j] > 0.0) {
                    cells.push_back({static_cast<double>(j) / static_cast<double>(n),
                                     static_cast<double>(j + 1) / static_cast<double>(n),
                                     cell_mass[i][j]});
                }
            }
            law.atoms.push_back(
                {cont.kernels[i].mass, PointLaw::piecewise_uniform(cont.kernels[i].atom, cells)});
        }
        return law;
    }
    throw std::logic_error("transport_coupling: unreachable");
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

SyntheticPPPModel::SyntheticPPPModel(SubUniformDist target, ConditionalLaw coupling, NamedCdf g,
                                     std::uint64_t seed, SynthesisReport report)
    : target_(std::move(target)),
      coupling_(std::move(coupling)),
      g_(g),
      seed_(seed),
      report_(std::move(report)) {}

double SyntheticPPPModel::u_t(const Observation& d, double t) const {
    if (d.component == kDiagonal) return d.value;
    return mod1_family(coupling_.atoms.at(d.component).law, g_, t, d.value);
}

std::string SyntheticPPPModel::id() const {
    return "synthetic(" + target_.describe() + ",G=" + g_.name() + ")";
}

double SyntheticPPPModel::sample_theta(RngStream& rng) const {
    return g_.quantile(rng.uniform_open());
}

Observation SyntheticPPPModel::sample_data(double, RngStream& rng) const {
    const auto draw = sample_coupling(coupling_, rng);
    return {draw.s, draw.component};
}

std::vector<ThetaMass> SyntheticPPPModel::posterior(const Observation&) const { return {}; }

double SyntheticPPPModel::sample_posterior(const Observation&, RngStream& rng) const {
    return sample_theta(rng);
}

double SyntheticPPPModel::discrepancy(const Observation& d, double theta) const {
    const double u = u_t(d, theta);
    return u > 0.0 ? -std::log(u) : std::numeric_limits<double>::infinity();
}

double SyntheticPPPModel::conditional_sf(double theta, const Observation& d) const {
    // f(D*, t) >= f(D, t) iff U*_t <= U_t, and U*_t is uniform.
    return std::clamp(u_t(d, theta), 0.0, 1.0);
}

double SyntheticPPPModel::exact_ppp(const Observation& d) const {
    if (d.component == kDiagonal) return d.value;
    return coupling_.atoms.at(d.component).law.mean();
}

SyntheticPPPModel synthesize_ppp(const SubUniformDist& target, const NamedCdf& g,
                                 const RngStream& rng, const SynthesisOptions& opt) {
    const auto check = is_sub_uniform(target);
    if (!check.sub_uniform) {
        const double witness = check.dominance.witness.value_or(1.0);
        // With the IDFs ordered pointwise, the failure is in the means.
        const bool pointwise = check.dominance.max_violation > 1e-9;
        const double violation =
            pointwise ? check.dominance.max_violation : std::abs(check.mean - 0.5);
        throw ConvexOrderError("synthesize_ppp: target " + target.describe() +
                                   " is not sub-uniform (" +
                                   (pointwise ? "phi exceeds x^2/2" : "mean differs from 1/2") +
                                   " at x=" + fmt(witness) + ")",
                               witness, violation);
    }
    SynthesisReport report;
    ConditionalLaw law;
    double alpha = 0.0;
    if (std::holds_alternative<Uniform01>(target.variant())) {
        report.method = "singular";
        law.diagonal.push_back({0.0, 1.0, 1.0});
    } else if (is_p2alpha_form(target, &alpha)) {
        report.method = "explicit_p2alpha";
        law = explicit_p2alpha_coupling(alpha);
        report.kernel_scale = 1.0;
    } else {
        report.method = "transport";
        law = transport_coupling(target, opt, report);
    }
    report.martingale_residual = law.martingale_residual();
    report.atoms = law.atoms.size();
    return SyntheticPPPModel(target, std::move(law), g, rng.seed(), std::move(report));
}

} // namespace ppp
