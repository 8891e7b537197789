#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ppp {

// A non-empty sample kept in non-decreasing order.
class EmpiricalSample {
  public:
    // Sorts `values`. Throws std::invalid_argument when empty or when a value is NaN.
    explicit EmpiricalSample(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    double mean() const;
    // Unbiased sample variance (0 for n = 1).
    double variance() const;
    // Fraction of values <= x.
    double cdf(double x) const;
    // Fraction of values within `tol` of x.
    double fraction_near(double x, double tol) const;

  private:
    std::vector<double> values_;
};

// ln Gamma(x) for x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

// ln(1 + d) - d, accurate for small |d|. Requires d > -1.
double log1pmx(double d);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// P(chi2_k >= x). Throws std::domain_error for x < 0 or k < 1.
double chi2_sf(double x, double k);

// Upper-tail critical value: returns t with chi2_sf(t, k) = upper_tail.
// Throws std::domain_error unless upper_tail is in (0, 1) and k >= 1.
double chi2_quantile(double upper_tail, double k);

using CdfFunction = std::function<double(double)>;

// sup_x |F_n(x) - F(x)| for a right-continuous F. Tied sample values are
// compared against F on both sides of the jump, so distributions with atoms
// are handled exactly.
double ks_statistic(const EmpiricalSample& sample, const CdfFunction& cdf);

} // namespace ppp
