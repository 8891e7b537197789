#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "ppp/idf.hpp"

namespace ppp {

// Largest h with F_X(alpha) <= h for every X <=_cx Y:
//   h = min(1, max{w >= 0 : w (x - alpha) <= phi_Y(x) for all x}).
// Solved by bisection on w; the inner minimum of the convex function
// phi_Y(x) - w (x - alpha) is found by ternary search over the support.
double h_bound(double alpha, const IntegratedDF& phi_y);

// min(1, 2p). Throws std::domain_error unless p is in [0, 1].
double conservative_single(double p);

struct FisherScore {
    double score = 0.0;
    std::size_t m = 0;
    // Number of zero p-values floored at kFisherFloor before taking logs.
    std::size_t floored_zeros = 0;
};

inline constexpr double kFisherFloor = 1e-300;

// -2 sum ln p_i. Throws std::domain_error for an empty list or any value
// outside [0, 1]; zeros are floored and counted, never dropped.
FisherScore fisher_score(std::span<const double> pvals);

// A bound that only holds in part of its domain.
struct OptionalBound {
    std::optional<double> value;
    std::string reason; // set when value is empty
};

struct FisherReport {
    double score = 0.0;
    std::size_t m = 0;
    double nominal_p = 1.0;
    double bound_shifted_chi2 = 1.0;
    OptionalBound bound_cantelli;
    OptionalBound bound_mgf;
    double conservative_p = 1.0;
    std::size_t floored_zeros = 0;
};

// Nominal and conservative tail probabilities for a Fisher score built from
// m sub-uniform p-values. Cantelli and MGF bounds need score >= 2m.
FisherReport fisher_bounds(double score, std::size_t m);
FisherReport fisher_bounds(const FisherScore& s);

// Upper-tail alpha critical value of chi2 with 2m degrees of freedom.
double fisher_critical(double alpha, std::size_t m);

// 1 - (1 - 2x)^m, or 1 when x > 1/2. Throws std::domain_error for x < 0 or m = 0.
double minp_bound(double x, std::size_t m);
// 1 - (1 - x)^m: tail of the minimum of m independent uniforms.
double minp_nominal(double x, std::size_t m);

struct MinpLimit {
    // 1 - {2 (1 - q)^{1/m} - 1}^m, empty when the base is negative.
    std::optional<double> bound_in_q;
    double limit = 0.0; // 2q - q^2
};

MinpLimit minp_limit_check(double q, std::size_t m);

} // namespace ppp
