#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ppp/numerics.hpp"

namespace ppp {

enum class AnalyticFamily { Uniform01, Beta22 };

// Integrated distribution function phi(x) = int_{-inf}^x F(t) dt.
//
// Two representations:
//  * analytic, for the uniform and Beta(2,2) laws on [0, 1];
//  * piecewise, given by strictly increasing breakpoints x_i with the CDF's
//    left limit F(x_i-) and value F(x_i) at each. F is 0 left of x_0, linear
//    between (x_i, F(x_i)) and (x_{i+1}, F(x_{i+1}-)), and a jump at x_i is
//    F(x_i) - F(x_i-). phi is then piecewise quadratic and evaluated exactly.
//
// Constructors do not validate; call validate() on untrusted input.
class IntegratedDF {
  public:
    static IntegratedDF analytic(AnalyticFamily family);
    static IntegratedDF uniform() { return analytic(AnalyticFamily::Uniform01); }
    // cdf_left empty means a continuous CDF, i.e. cdf_left[i] = cdf[i] for i > 0
    // and cdf_left[0] = 0.
    static IntegratedDF piecewise(std::vector<double> breakpoints, std::vector<double> cdf,
                                  std::vector<double> cdf_left = {});
    static IntegratedDF point_mass(double at);

    bool is_analytic() const { return family_.has_value(); }
    std::optional<AnalyticFamily> family() const { return family_; }
    const std::vector<double>& breakpoints() const { return x_; }
    const std::vector<double>& cdf_values() const { return f_; }
    const std::vector<double>& cdf_left_values() const { return f_left_; }

    // Number of observations behind an empirical IDF (0 if not empirical).
    std::size_t sample_size() const { return sample_size_; }
    void set_sample_size(std::size_t n) { sample_size_ = n; }

    double support_lo() const;
    double support_hi() const;

    double evaluate(double x) const;
    // F(x) = right derivative of phi.
    double right_derivative(double x) const;

  private:
    std::optional<AnalyticFamily> family_;
    std::vector<double> x_;
    std::vector<double> f_;
    std::vector<double> f_left_;
    std::vector<double> phi_at_; // phi(x_i)
    std::size_t sample_size_ = 0;

    void build_prefix();
};

enum class IdfProperty { Monotone, Convexity, DerivativeRange, Limits };

std::string to_string(IdfProperty p);

struct IdfViolation {
    IdfProperty property;
    double location;
    std::string detail;
};

// Checks derivative range, then monotonicity/convexity, then limit behaviour,
// and reports the first failing property.
std::optional<IdfViolation> validate(const IntegratedDF& idf);

struct DominanceResult {
    bool holds = false;
    // Point of largest violation phi_lower(x) - phi_upper(x) when !holds.
    std::optional<double> witness;
    double max_violation = 0.0;
    double mean_gap = 0.0;
};

// Default tolerance: 1e-9 for exact inputs, 3 / sqrt(n) when either side is
// an empirical IDF built from n samples.
double default_dominance_tolerance(const IntegratedDF& a, const IntegratedDF& b);

// lower <=_cx upper, checked on the union of both breakpoint sets plus 1024
// uniformly spaced points over the joint support.
DominanceResult dominates_cx(const IntegratedDF& lower, const IntegratedDF& upper, double tol);
DominanceResult dominates_cx(const IntegratedDF& lower, const IntegratedDF& upper);

// Empirical IDF: breakpoints at the distinct order statistics, F_i = i / n.
IntegratedDF from_samples(const EmpiricalSample& sample);

// E(X) = hi - phi(hi). Throws std::domain_error if the support is unbounded.
double mean_of(const IntegratedDF& idf);

// sup over a uniform grid of |phi_a - phi_b|.
double max_abs_difference(const IntegratedDF& a, const IntegratedDF& b, double lo, double hi,
                          std::size_t points);

} // namespace ppp
