#include "ppp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ppp/numerics.hpp"

namespace ppp {

namespace {

// min over x >= alpha of phi_Y(x) - w (x - alpha). Left of alpha the
// function is positive, and right of the support its slope is 1 - w >= 0.
double min_gap(double alpha, double w, const IntegratedDF& phi_y) {
    auto g = [&](double x) { return phi_y.evaluate(x) - w * (x - alpha); };
    double lo = alpha;
    double hi = std::max(alpha, phi_y.support_hi());
    double best = std::min(g(lo), g(hi));
    for (double b : phi_y.breakpoints()) {
        if (b >= lo && b <= hi) best = std::min(best, g(b));
    }
    const double inv_phi = 1.0 / std::numbers::phi;
    double a = lo;
    double b = hi;
    double c = b - (b - a) * inv_phi;
    double d = a + (b - a) * inv_phi;
    double gc = g(c);
    double gd = g(d);
    for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
        if (gc <= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - (b - a) * inv_phi;
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + (b - a) * inv_phi;
            gd = g(d);
        }
    }
    return std::min({best, gc, gd});
}

} // namespace

double h_bound(double alpha, const IntegratedDF& phi_y) {
    if (std::isnan(alpha)) throw std::domain_error("h_bound: alpha is NaN");
    if (min_gap(alpha, 1.0, phi_y) >= 0.0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (min_gap(alpha, mid, phi_y) >= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double conservative_single(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("conservative_single: p must lie in [0, 1]");
    }
    return std::min(1.0, 2.0 * p);
}

FisherScore fisher_score(std::span<const double> pvals) {
    if (pvals.empty()) throw std::domain_error("fisher_score: no p-values");
    FisherScore s;
    s.m = pvals.size();
    for (double p : pvals) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::domain_error("fisher_score: p-values must lie in [0, 1]");
        }
        if (p == 0.0) {
            ++s.floored_zeros;
            p = kFisherFloor;
        }
        s.score -= 2.0 * std::log(p);
    }
    return s;
}

FisherReport fisher_bounds(double score, std::size_t m) {
    if (!(score >= 0.0) || m == 0) {
        throw std::domain_error("fisher_bounds: need score >= 0 and m >= 1");
    }
    const double md = static_cast<double>(m);
    const double k = 2.0 * md;
    FisherReport r;
    r.score = score;
    r.m = m;
    r.nominal_p = chi2_sf(score, k);
    r.bound_shifted_chi2 = chi2_sf(std::max(0.0, score - k * std::numbers::ln2), k);
    r.conservative_p = r.bound_shifted_chi2;
    if (score >= k) {
        const double half_excess = 0.5 * (score - k);
        r.bound_cantelli.value = md / (md + half_excess * half_excess);
        // exp{m - x/2 - m ln(2m/x)} = exp{m (ln(1 + d) - d)} with x = 2m(1 + d).
        const double d = (score - k) / k;
        r.bound_mgf.value = std::exp(md * log1pmx(d));
        r.conservative_p =
            std::min({r.conservative_p, *r.bound_cantelli.value, *r.bound_mgf.value});
    } else {
        r.bound_cantelli.reason = "score below 2m";
        r.bound_mgf.reason = "score below 2m";
    }
    r.conservative_p = std::min(1.0, r.conservative_p);
    return r;
}

FisherReport fisher_bounds(const FisherScore& s) {
    FisherReport r = fisher_bounds(s.score, s.m);
    r.floored_zeros = s.floored_zeros;
    return r;
}

double fisher_critical(double alpha, std::size_t m) {
    if (m == 0) throw std::domain_error("fisher_critical: m must be >= 1");
    return chi2_quantile(alpha, 2.0 * static_cast<double>(m));
}

double minp_bound(double x, std::size_t m) {
    if (!(x >= 0.0) || m == 0) {
        throw std::domain_error("minp_bound: need x >= 0 and m >= 1");
    }
    if (x >= 0.5) return 1.0;
    return -std::expm1(static_cast<double>(m) * std::log1p(-2.0 * x));
}

double minp_nominal(double x, std::size_t m) {
    if (!(x >= 0.0) || m == 0) {
        throw std::domain_error("minp_nominal: need x >= 0 and m >= 1");
    }
    if (x >= 1.0) return 1.0;
    return -std::expm1(static_cast<double>(m) * std::log1p(-x));
}

MinpLimit minp_limit_check(double q, std::size_t m) {
    if (!(q >= 0.0 && q < 1.0) || m == 0) {
        throw std::domain_error("minp_limit_check: need q in [0, 1) and m >= 1");
    }
    const double md = static_cast<double>(m);
    MinpLimit out;
    out.limit = q * (2.0 - q);
    // base = 2 (1 - q)^{1/m} - 1, kept as an offset from 1 for large m.
    const double base_minus_one = 2.0 * std::expm1(std::log1p(-q) / md);
    if (base_minus_one < -1.0) return out;
    out.bound_in_q = -std::expm1(md * std::log1p(base_minus_one));
    return out;
}

} // namespace ppp
