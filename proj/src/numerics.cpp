#include "ppp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ppp {

EmpiricalSample::EmpiricalSample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw std::invalid_argument("EmpiricalSample: at least one value is required");
    }
    for (double v : values_) {
        if (std::isnan(v)) {
            throw std::invalid_argument("EmpiricalSample: NaN value");
        }
    }
    std::sort(values_.begin(), values_.end());
}

double EmpiricalSample::mean() const {
    double sum = 0.0;
    for (double v : values_) sum += v;
    return sum / static_cast<double>(values_.size());
}

double EmpiricalSample::variance() const {
    if (values_.size() < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double v : values_) ss += (v - m) * (v - m);
    return ss / static_cast<double>(values_.size() - 1);
}

double EmpiricalSample::cdf(double x) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalSample::fraction_near(double x, double tol) const {
    const auto lo = std::lower_bound(values_.begin(), values_.end(), x - tol);
    const auto hi = std::upper_bound(values_.begin(), values_.end(), x + tol);
    return static_cast<double>(hi - lo) / static_cast<double>(values_.size());
}

double log_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("log_gamma: argument must be positive");
    }
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign); // reentrant, leaves signgam untouched
#else
    return std::lgamma(x);
#endif
}

double log1pmx(double d) {
    if (std::abs(d) < 0.01) {
        double term = d;
        double sum = 0.0;
        for (int n = 2; n <= 14; ++n) {
            term *= -d;
            sum += term / n;
        }
        return sum;
    }
    return std::log1p(d) - d;
}

namespace {

constexpr double kRelTol = 1e-15;
constexpr double kTiny = 1e-300;

// ln Gamma(a) - [(a - 1/2) ln a - a + ln sqrt(2 pi)]
double stirling_correction(double a) {
    const double r = 1.0 / a;
    const double r2 = r * r;
    return r * (1.0 / 12.0 -
                r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
}

// ln(x^a e^{-x} / Gamma(a)). For large a near the mode the direct form loses
// all precision to cancellation, so the Stirling-scaled form is used there.
double log_gamma_prefix(double a, double x) {
    const double d = (x - a) / a;
    if (a >= 50.0 && std::abs(d) < 0.5) {
        return a * log1pmx(d) + 0.5 * std::log(a / (2.0 * std::numbers::pi)) -
               stirling_correction(a);
    }
    return a * std::log(x) - x - log_gamma(a);
}

// Iteration cap grows with sqrt(a): both expansions need O(sqrt(a)) terms
// when x is close to a.
int iteration_cap(double a) {
    return 500 + static_cast<int>(20.0 * std::sqrt(a));
}

double lower_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    const int cap = iteration_cap(a);
    for (int n = 1; n <= cap; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kRelTol) {
            return std::exp(log_gamma_prefix(a, x)) * sum;
        }
    }
    throw std::runtime_error("gamma_p: series failed to converge for a=" + std::to_string(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double upper_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    const int cap = iteration_cap(a);
    for (int i = 1; i <= cap; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kRelTol) {
            return std::exp(log_gamma_prefix(a, x)) * h;
        }
    }
    throw std::runtime_error("gamma_q: continued fraction failed to converge for a=" +
                             std::to_string(a));
}

void check_gamma_args(double a, double x) {
    if (!(a > 0.0) || std::isnan(x) || x < 0.0) {
        throw std::domain_error("incomplete gamma: require a > 0 and x >= 0");
    }
}

} // namespace

double gamma_p(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return std::min(1.0, lower_series(a, x));
    return 1.0 - upper_fraction(a, x);
}

double gamma_q(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return std::max(0.0, 1.0 - lower_series(a, x));
    return upper_fraction(a, x);
}

double chi2_sf(double x, double k) {
    if (std::isnan(x) || x < 0.0) {
        throw std::domain_error("chi2_sf: x must be non-negative");
    }
    if (!(k >= 1.0)) {
        throw std::domain_error("chi2_sf: degrees of freedom must be >= 1");
    }
    return gamma_q(0.5 * k, 0.5 * x);
}

namespace {

double chi2_density(double t, double k) {
    if (t <= 0.0) return 0.0;
    const double x = 0.5 * t;
    return 0.5 * std::exp(log_gamma_prefix(0.5 * k, x) - std::log(x));
}

} // namespace

double chi2_quantile(double upper_tail, double k) {
    if (!(upper_tail > 0.0 && upper_tail < 1.0)) {
        throw std::domain_error("chi2_quantile: upper-tail probability must lie in (0, 1)");
    }
    if (!(k >= 1.0)) {
        throw std::domain_error("chi2_quantile: degrees of freedom must be >= 1");
    }
    double lo = 0.0;
    double hi = k + 40.0 * std::sqrt(2.0 * k) + 100.0;
    while (chi2_sf(hi, k) > upper_tail) {
        lo = hi;
        hi *= 2.0;
    }

    const double log_target = std::log(upper_tail);
    double t = std::clamp(k, lo, hi);
    for (int iter = 0; iter < 400; ++iter) {
        const double s = chi2_sf(t, k);
        if (s > upper_tail) {
            lo = t;
        } else {
            hi = t;
        }
        if (std::abs(s - upper_tail) <= 1e-15 * upper_tail) break;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;

        // Newton on ln sf, which stays well scaled deep in either tail.
        const double dens = chi2_density(t, k);
        double next = std::numeric_limits<double>::quiet_NaN();
        if (dens > 0.0 && s > 0.0) {
            next = t + (std::log(s) - log_target) * s / dens;
        }
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        t = next;
    }
    return t;
}

double ks_statistic(const EmpiricalSample& sample, const CdfFunction& cdf) {
    const auto v = sample.values();
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
        const double x = v[i];
        const double f_at = cdf(x);
        const double f_left = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
        const double emp_left = static_cast<double>(i) / n;
        const double emp_at = static_cast<double>(j + 1) / n;
        d = std::max({d, std::abs(emp_at - f_at), std::abs(emp_left - f_left)});
        i = j + 1;
    }
    return d;
}

} // namespace ppp
