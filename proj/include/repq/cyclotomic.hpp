// Factorization of 4 (x^q - 1)/(x - 1) = f(x)^2 - D g(x)^2 over the quadratic
// subfield of the q-th cyclotomic field, with all coefficient/growth checks.
#pragma once

#include "repq/quadfield.hpp"

namespace repq {

struct HalfSplit {
    unsigned long q;
    long D;                          // (-1)^((q-1)/2) q
    std::vector<QuadInt> a_coeffs;   // coefficients of P+, leading first, a_0 = 1
    std::vector<Natural> f_coeffs;   // degree (q-1)/2, leading coefficient 2
    std::vector<Natural> g_coeffs;   // degree (q-3)/2, leading coefficient +1
};

/// Builds P+ = prod over quadratic residues m of (x - zeta^m) by dense exact
/// arithmetic in Z[zeta], projects to the quadratic subfield through the Gauss
/// sum, and returns f = P+ + P-, g = (P+ - P-)/sqrt(D).  Every projection is
/// verified to land in the half-integer order.
HalfSplit half_split(unsigned long q, unsigned long degree_cap = 2000);

Natural eval_f(const HalfSplit& hs, const Natural& x);
Natural eval_g(const HalfSplit& hs, const Natural& x);

struct GrowthReport {
    bool poly_bound_ok;   // |g(x)| <= 2 x^((q-3)/2)
    bool cond_12b_ok;     // |g(x)| < 2 (repunit_quotient)^((q-3)/(2(q-1)))
    Natural g_abs;
    Natural poly_bound;
    double margin_log;    // log(poly bound) - log|g|, >= 0 when ok
};

/// Requires x >= ceil(q^{3/2}); a violation falsifies the growth chain and is
/// reported, never ignored.
GrowthReport growth_check(const HalfSplit& hs, const Natural& x);

struct CoefficientBoundsReport {
    bool ok;
    bool b0_is_unit;                  // leading g coefficient = ±1 before normalization
    double worst_a_margin_log;        // min over i of log(q^i) - log|a_i|
    double worst_b_margin_log;        // min over i of log(q^(i+1/2)/2) - log|b_i|
    std::vector<double> b_ratio_obs;  // observed |b_i| 2 sqrt(q) / |a_{i+1}| style ratios
};

CoefficientBoundsReport coefficient_bounds_check(const HalfSplit& hs);

/// Coefficientwise check 4*Phi_q = f^2 - D g^2 (exact).
bool identity_check(const HalfSplit& hs);

}  // namespace repq
