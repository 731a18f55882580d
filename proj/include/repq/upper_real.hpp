// Certified positive reals in log form: every quantity carries a directed
// lower/upper bracket of its natural log, so magnitudes like c2(s+2) never
// overflow and every reported bound is rigorous up to outward rounding.
#pragma once

#include <string>

#include <gmpxx.h>
#include <mpfr.h>

namespace repq {

class UpperReal {
public:
    UpperReal();                       // exact zero (log = -inf)
    UpperReal(const UpperReal& o);
    UpperReal(UpperReal&& o) noexcept;
    UpperReal& operator=(const UpperReal& o);
    UpperReal& operator=(UpperReal&& o) noexcept;
    ~UpperReal();

    static unsigned default_precision();            // bits, >= 64; default 128
    static void set_default_precision(unsigned bits);

    static UpperReal from_integer(const mpz_class& n);   // n >= 0, exact value
    static UpperReal from_ui(unsigned long n);
    static UpperReal from_double(double v);              // v >= 0
    static UpperReal from_ratio_ui(unsigned long num, unsigned long den);
    /// Value whose natural log is bracketed by [lo, hi].
    static UpperReal from_log_bounds(const mpfr_t lo, const mpfr_t hi);

    bool is_zero() const;

    friend UpperReal operator*(const UpperReal& a, const UpperReal& b);
    friend UpperReal operator/(const UpperReal& a, const UpperReal& b);
    friend UpperReal operator+(const UpperReal& a, const UpperReal& b);  // value addition
    UpperReal pow_ui(unsigned long e) const;
    UpperReal sqrt_value() const;

    /// ln(value) as a value of its own; requires value >= 1 (exact zero for value 1).
    UpperReal log_value() const;
    /// max(value, 2) -- the paper's angle-bracket operator.
    UpperReal at_least_two() const;
    static UpperReal max(const UpperReal& a, const UpperReal& b);

    double log_upper() const;   // upper bracket of ln(value)
    double log_lower() const;
    double log_width() const;   // rounding slack, log domain

    /// True when this value is certainly <= other (upper bracket vs lower).
    bool certified_leq(const UpperReal& other) const;
    /// True when this value is certainly < other.
    bool certified_lt(const UpperReal& other) const;

    std::string log_string(int digits = 12) const;        // midpoint of the log bracket
    std::string decimal_scientific(int digits = 6) const;  // "m.mmmmme+NN"

    /// Re-evaluates nothing; exposes the raw brackets for tests.
    void get_log_bounds(mpfr_t lo_out, mpfr_t hi_out) const;

private:
    mpfr_t lo_, hi_;  // brackets of ln(value); lo_ rounded down, hi_ up
    void init();
    static UpperReal from_log_pair(const mpfr_t lo, const mpfr_t hi);
    friend UpperReal log_sum_exp(const UpperReal&, const UpperReal&);
};

}  // namespace repq
