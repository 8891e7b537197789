#include "ppp/idf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ppp {

IntegratedDF IntegratedDF::analytic(AnalyticFamily family) {
    IntegratedDF idf;
    idf.family_ = family;
    return idf;
}

IntegratedDF IntegratedDF::piecewise(std::vector<double> breakpoints, std::vector<double> cdf,
                                     std::vector<double> cdf_left) {
    if (breakpoints.empty()) {
        throw std::invalid_argument("IntegratedDF: at least one breakpoint is required");
    }
    if (cdf.size() != breakpoints.size()) {
        throw std::invalid_argument("IntegratedDF: breakpoints and cdf differ in length");
    }
    if (cdf_left.empty()) {
        cdf_left = cdf;
        cdf_left[0] = 0.0;
    } else if (cdf_left.size() != breakpoints.size()) {
        throw std::invalid_argument("IntegratedDF: breakpoints and cdf_left differ in length");
    }
    IntegratedDF idf;
    idf.x_ = std::move(breakpoints);
    idf.f_ = std::move(cdf);
    idf.f_left_ = std::move(cdf_left);
    idf.build_prefix();
    return idf;
}

IntegratedDF IntegratedDF::point_mass(double at) {
    return piecewise({at}, {1.0}, {0.0});
}

void IntegratedDF::build_prefix() {
    phi_at_.assign(x_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
        const double len = x_[i + 1] - x_[i];
        phi_at_[i + 1] = phi_at_[i] + 0.5 * len * (f_[i] + f_left_[i + 1]);
    }
}

double IntegratedDF::support_lo() const {
    return family_ ? 0.0 : x_.front();
}

double IntegratedDF::support_hi() const {
    return family_ ? 1.0 : x_.back();
}

double IntegratedDF::evaluate(double x) const {
    if (family_) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return x - 0.5;
        if (*family_ == AnalyticFamily::Uniform01) return 0.5 * x * x;
        return x * x * x - 0.5 * x * x * x * x;
    }
    if (x < x_.front()) return 0.0;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double t = x - x_[i];
    if (i + 1 == x_.size()) {
        return phi_at_[i] + f_[i] * t;
    }
    const double len = x_[i + 1] - x_[i];
    const double f_x = f_[i] + (f_left_[i + 1] - f_[i]) * (t / len);
    return phi_at_[i] + 0.5 * t * (f_[i] + f_x);
}

double IntegratedDF::right_derivative(double x) const {
    if (family_) {
        const double c = std::clamp(x, 0.0, 1.0);
        if (*family_ == AnalyticFamily::Uniform01) return c;
        return c * c * (3.0 - 2.0 * c);
    }
    if (x < x_.front()) return 0.0;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 == x_.size()) return f_[i];
    const double len = x_[i + 1] - x_[i];
    return f_[i] + (f_left_[i + 1] - f_[i]) * ((x - x_[i]) / len);
}

std::string to_string(IdfProperty p) {
    switch (p) {
    case IdfProperty::Monotone:
        return "monotone";
    case IdfProperty::Convexity:
        return "convexity";
    case IdfProperty::DerivativeRange:
        return "derivative_range";
    case IdfProperty::Limits:
        return "limits";
    }
    return "unknown";
}

std::optional<IdfViolation> validate(const IntegratedDF& idf) {
    if (idf.is_analytic()) return std::nullopt;

    const auto& x = idf.breakpoints();
    const auto& f = idf.cdf_values();
    const auto& fl = idf.cdf_left_values();

    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || (i > 0 && !(x[i] > x[i - 1]))) {
            return IdfViolation{IdfProperty::Monotone, x[i],
                                "breakpoints must be finite and strictly increasing"};
        }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (double v : {fl[i], f[i]}) {
            if (!(v >= 0.0 && v <= 1.0)) {
                return IdfViolation{IdfProperty::DerivativeRange, x[i],
                                    "right derivative " + std::to_string(v) + " outside [0, 1]"};
            }
        }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (f[i] < fl[i]) {
            return IdfViolation{IdfProperty::Convexity, x[i], "CDF decreases across breakpoint"};
        }
        if (i + 1 < x.size() && fl[i + 1] < f[i]) {
            return IdfViolation{IdfProperty::Convexity, x[i + 1],
                                "CDF decreases between breakpoints"};
        }
    }
    // Midpoint convexity on a grid, as a guard on the algebra above.
    const double lo = x.front() - 1.0;
    const double hi = x.back() + 1.0;
    constexpr int kGrid = 256;
    for (int i = 0; i + 2 <= kGrid; ++i) {
        const double a = lo + (hi - lo) * i / kGrid;
        const double b = lo + (hi - lo) * (i + 2) / kGrid;
        const double mid = 0.5 * (a + b);
        if (idf.evaluate(mid) > 0.5 * (idf.evaluate(a) + idf.evaluate(b)) + 1e-12) {
            return IdfViolation{IdfProperty::Convexity, mid, "midpoint convexity fails"};
        }
    }
    if (fl.front() != 0.0) {
        return IdfViolation{IdfProperty::Limits, x.front(),
                            "CDF left limit at the first breakpoint must be 0"};
    }
    if (std::abs(f.back() - 1.0) > 1e-12) {
        return IdfViolation{IdfProperty::Limits, x.back(),
                            "CDF must reach 1 at the last breakpoint"};
    }
    return std::nullopt;
}

double default_dominance_tolerance(const IntegratedDF& a, const IntegratedDF& b) {
    std::size_t n = 0;
    for (const auto* idf : {&a, &b}) {
        if (idf->sample_size() > 0) {
            n = (n == 0) ? idf->sample_size() : std::min(n, idf->sample_size());
        }
    }
    return n == 0 ? 1e-9 : 3.0 / std::sqrt(static_cast<double>(n));
}

DominanceResult dominates_cx(const IntegratedDF& lower, const IntegratedDF& upper, double tol) {
    const double lo = std::min(lower.support_lo(), upper.support_lo());
    const double hi = std::max(lower.support_hi(), upper.support_hi());

    DominanceResult result;
    double worst = -std::numeric_limits<double>::infinity();
    double worst_at = lo;
    auto probe = [&](double x) {
        const double gap = lower.evaluate(x) - upper.evaluate(x);
        if (gap > worst) {
            worst = gap;
            worst_at = x;
        }
    };
    for (const auto* idf : {&lower, &upper}) {
        for (double x : idf->breakpoints()) probe(x);
    }
    constexpr int kGrid = 1024;
    for (int i = 0; i <= kGrid; ++i) {
        probe(lo + (hi - lo) * static_cast<double>(i) / kGrid);
    }

    result.max_violation = worst;
    result.mean_gap = mean_of(lower) - mean_of(upper);
    const bool pointwise = worst <= tol;
    const bool means = std::abs(result.mean_gap) <= tol;
    result.holds = pointwise && means;
    if (!pointwise) {
        result.witness = worst_at;
    } else if (!means) {
        result.witness = hi;
    }
    return result;
}

DominanceResult dominates_cx(const IntegratedDF& lower, const IntegratedDF& upper) {
    return dominates_cx(lower, upper, default_dominance_tolerance(lower, upper));
}

IntegratedDF from_samples(const EmpiricalSample& sample) {
    const auto v = sample.values();
    const double n = static_cast<double>(v.size());
    std::vector<double> x;
    std::vector<double> f;
    std::vector<double> fl;
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        x.push_back(v[i]);
        fl.push_back(static_cast<double>(count) / n);
        count = j;
        f.push_back(static_cast<double>(count) / n);
        i = j;
    }
    auto idf = IntegratedDF::piecewise(std::move(x), std::move(f), std::move(fl));
    idf.set_sample_size(v.size());
    return idf;
}

double mean_of(const IntegratedDF& idf) {
    const double hi = idf.support_hi();
    if (!std::isfinite(hi)) {
        throw std::domain_error("mean_of: support is unbounded above");
    }
    return hi - idf.evaluate(hi);
}

double max_abs_difference(const IntegratedDF& a, const IntegratedDF& b, double lo, double hi,
                          std::size_t points) {
    double worst = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double x =
            points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        worst = std::max(worst, std::abs(a.evaluate(x) - b.evaluate(x)));
    }
    return worst;
}

} // namespace ppp
