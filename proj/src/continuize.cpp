#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ppp/coupling.hpp"

namespace ppp {

namespace {

constexpr double kTouch = 1e-12;      // phi_nu - phi_mu at or below this counts as contact
constexpr double kChordTol = 1e-13;   // slack allowed for a chord above phi_nu
constexpr int kGridLog2 = 14;
constexpr int kStepLog2 = 20;
constexpr std::size_t kMaxPoints = 100000;
constexpr double kAtomClearance = 1e-12;

// max over [a, b] of (chord - phi_nu), which is concave.
double chord_excess(const IntegratedDF& mu, const IntegratedDF& nu, double a, double b) {
    const double fa = mu.evaluate(a);
    const double fb = mu.evaluate(b);
    auto g = [&](double t) {
        const double chord = fa + (fb - fa) * (t - a) / (b - a);
        return chord - nu.evaluate(t);
    };
    double lo = a;
    double hi = b;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (g(m1) < g(m2)) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    return std::max({g(a), g(b), g(0.5 * (lo + hi))});
}

bool near_atom(const std::vector<double>& atoms, double x) {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), x);
    if (it != atoms.end() && *it - x <= kAtomClearance) return true;
    if (it != atoms.begin() && x - *std::prev(it) <= kAtomClearance) return true;
    return false;
}

std::vector<double> chain(const IntegratedDF& mu_idf, const IntegratedDF& nu,
                          const std::vector<double>& atoms, double a, double b, double beta) {
    std::vector<double> pts{a};
    double xj = a;
    while (true) {
        if (pts.size() > kMaxPoints) {
            throw std::runtime_error("continuize: interpolation did not reach the interval end");
        }
        double xp;
        if (chord_excess(mu_idf, nu, xj, b) <= kChordTol) {
            xp = b;
        } else {
            double lo = xj;
            double hi = b;
            for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
                const double mid = 0.5 * (lo + hi);
                if (chord_excess(mu_idf, nu, xj, mid) <= kChordTol) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            xp = lo;
        }
        if (xp >= b) {
            pts.push_back(b);
            return pts;
        }
        // Step back from x' toward x_j until off the atoms of mu.
        const double span = beta * (xp - xj);
        const double step = span / static_cast<double>(1 << kStepLog2);
        double next = xp;
        bool found = false;
        for (int k = 0; k <= (1 << kStepLog2); ++k) {
            next = xp - k * step;
            if (!near_atom(atoms, next)) {
                found = true;
                break;
            }
        }
        if (!found || next <= xj) {
            throw std::runtime_error("continuize: interpolation stalled");
        }
        pts.push_back(next);
        xj = next;
    }
}

} // namespace

DiscreteMeasure DiscreteMeasure::from_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });
    DiscreteMeasure m;
    for (const auto& a : atoms) {
        if (!(a.mass >= 0.0) || !std::isfinite(a.location)) {
            throw std::invalid_argument("discrete measure: masses must be >= 0, locations finite");
        }
        if (a.mass == 0.0) continue;
        if (!m.x.empty() && m.x.back() == a.location) {
            m.w.back() += a.mass;
        } else {
            m.x.push_back(a.location);
            m.w.push_back(a.mass);
        }
    }
    return m;
}

double DiscreteMeasure::total() const {
    double t = 0.0;
    for (double v : w) t += v;
    return t;
}

double DiscreteMeasure::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * w[i];
    return s / total();
}

IntegratedDF idf_of(const DiscreteMeasure& m) {
    if (m.x.empty()) throw std::invalid_argument("idf_of: empty measure");
    std::vector<double> f;
    std::vector<double> fl;
    double cum = 0.0;
    for (double v : m.w) {
        fl.push_back(cum);
        cum += v;
        f.push_back(cum);
    }
    return IntegratedDF::piecewise(m.x, std::move(f), std::move(fl));
}

ContinuizeResult continuize(const DiscreteMeasure& mu, const IntegratedDF& nu, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("continuize: beta must lie in (0, 1)");
    if (mu.x.empty()) throw std::invalid_argument("continuize: empty measure");
    const IntegratedDF mu_idf = idf_of(mu);
    const auto dom = dominates_cx(mu_idf, nu, 1e-9);
    if (!dom.holds) {
        throw ConvexOrderError("continuize: source is not below target in convex order",
                               dom.witness.value_or(0.0), dom.max_violation);
    }

    const double lo = std::min(mu.x.front(), nu.support_lo());
    const double hi = std::max(mu.x.back(), nu.support_hi());
    std::vector<double> cand(mu.x);
    if (!nu.is_analytic()) {
        cand.insert(cand.end(), nu.breakpoints().begin(), nu.breakpoints().end());
    }
    constexpr int grid = 1 << kGridLog2;
    for (int i = 0; i <= grid; ++i) cand.push_back(lo + (hi - lo) * i / grid);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    ContinuizeResult out;
    std::vector<bool> touch(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) {
        touch[i] = nu.evaluate(cand[i]) - mu_idf.evaluate(cand[i]) <= kTouch;
    }
    // Each run of non-contact candidates lies in one component; its ends are
    // the neighbouring contact candidates.
    std::size_t i = 0;
    while (i < cand.size()) {
        if (touch[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < cand.size() && !touch[j]) ++j;
        const double a = i == 0 ? lo : cand[i - 1];
        const double b = j == cand.size() ? hi : cand[j];
        if (b > a) out.intervals.push_back({a, b, chain(mu_idf, nu, mu.x, a, b, beta)});
        i = j;
    }

    for (std::size_t k = 0; k < mu.x.size(); ++k) {
        const double p = mu.x[k];
        KernelPiece piece{p, mu.w[k], p, p};
        for (const auto& iv : out.intervals) {
            if (!(p > iv.lo && p < iv.hi)) continue;
            auto it = std::upper_bound(iv.points.begin(), iv.points.end(), p);
            if (it == iv.points.begin() || it == iv.points.end()) break;
            const double l = *std::prev(it);
            const double u = *it;
            if (l < p) {
                const double r = std::min(p - l, u - p);
                piece.lo = p - r;
                piece.hi = p + r;
            }
            break;
        }
        out.kernels.push_back(piece);
        if (piece.singular()) {
            out.mu_tilde.atoms.push_back({p, piece.mass});
        } else {
            out.mu_tilde.uniform_pieces.push_back({piece.lo, piece.hi, piece.mass});
        }
    }
    return out;
}

} // namespace ppp
