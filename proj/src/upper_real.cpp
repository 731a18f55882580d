#include "repq/upper_real.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace repq {

namespace {
std::atomic<unsigned> g_precision{128};
}

unsigned UpperReal::default_precision() { return g_precision.load(); }

void UpperReal::set_default_precision(unsigned bits) {
    if (bits < 64) throw std::invalid_argument("UpperReal: precision must be >= 64 bits");
    g_precision.store(bits);
}

void UpperReal::init() {
    mpfr_init2(lo_, g_precision.load());
    mpfr_init2(hi_, g_precision.load());
}

UpperReal::UpperReal() {
    init();
    mpfr_set_inf(lo_, -1);
    mpfr_set_inf(hi_, -1);
}

UpperReal::UpperReal(const UpperReal& o) {
    init();
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

UpperReal::UpperReal(UpperReal&& o) noexcept {
    mpfr_init2(lo_, mpfr_get_prec(o.lo_));
    mpfr_init2(hi_, mpfr_get_prec(o.hi_));
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
}

UpperReal& UpperReal::operator=(const UpperReal& o) {
    if (this != &o) {
        mpfr_set_prec(lo_, mpfr_get_prec(o.lo_));
        mpfr_set_prec(hi_, mpfr_get_prec(o.hi_));
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
}

UpperReal& UpperReal::operator=(UpperReal&& o) noexcept {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    return *this;
}

UpperReal::~UpperReal() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

UpperReal UpperReal::from_log_pair(const mpfr_t lo, const mpfr_t hi) {
    UpperReal r;
    mpfr_set(r.lo_, lo, MPFR_RNDD);
    mpfr_set(r.hi_, hi, MPFR_RNDU);
    return r;
}

UpperReal UpperReal::from_log_bounds(const mpfr_t lo, const mpfr_t hi) {
    return from_log_pair(lo, hi);
}

UpperReal UpperReal::from_integer(const mpz_class& n) {
    if (n < 0) throw std::invalid_argument("UpperReal: negative magnitude");
    UpperReal r;
    if (n == 0) return r;
    mpfr_t t;
    mpfr_init2(t, g_precision.load());
    mpfr_set_z(t, n.get_mpz_t(), MPFR_RNDD);
    mpfr_log(r.lo_, t, MPFR_RNDD);
    mpfr_set_z(t, n.get_mpz_t(), MPFR_RNDU);
    mpfr_log(r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

UpperReal UpperReal::from_ui(unsigned long n) { return from_integer(mpz_class(n)); }

UpperReal UpperReal::from_double(double v) {
    if (v < 0 || !std::isfinite(v)) throw std::invalid_argument("UpperReal: bad magnitude");
    UpperReal r;
    if (v == 0) return r;
    mpfr_t t;
    mpfr_init2(t, g_precision.load());
    mpfr_set_d(t, v, MPFR_RNDD);
    mpfr_log(r.lo_, t, MPFR_RNDD);
    mpfr_set_d(t, v, MPFR_RNDU);
    mpfr_log(r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

UpperReal UpperReal::from_ratio_ui(unsigned long num, unsigned long den) {
    return from_ui(num) / from_ui(den);
}

bool UpperReal::is_zero() const { return mpfr_inf_p(hi_) && mpfr_sgn(hi_) < 0; }

UpperReal operator*(const UpperReal& a, const UpperReal& b) {
    UpperReal r;
    if (a.is_zero() || b.is_zero()) return r;
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

UpperReal operator/(const UpperReal& a, const UpperReal& b) {
    if (b.is_zero()) throw std::domain_error("UpperReal: division by zero");
    UpperReal r;
    if (a.is_zero()) return r;
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
}

UpperReal log_sum_exp(const UpperReal& a, const UpperReal& b) {
    // bracket of ln(e^x + e^y) from brackets of x and y
    UpperReal r;
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const unsigned prec = UpperReal::default_precision();
    mpfr_t d, t;
    mpfr_inits2(prec, d, t, static_cast<mpfr_ptr>(nullptr));
    // lower: max(lo_a, lo_b) + log1p(exp(min - max)), rounded down
    const mpfr_t *hi1 = &a.lo_, *lo1 = &b.lo_;
    if (mpfr_cmp(a.lo_, b.lo_) < 0) { hi1 = &b.lo_; lo1 = &a.lo_; }
    mpfr_sub(d, *lo1, *hi1, MPFR_RNDD);
    mpfr_exp(d, d, MPFR_RNDD);
    mpfr_log1p(d, d, MPFR_RNDD);
    mpfr_add(r.lo_, *hi1, d, MPFR_RNDD);
    // upper: symmetric, rounded up
    const mpfr_t *hi2 = &a.hi_, *lo2 = &b.hi_;
    if (mpfr_cmp(a.hi_, b.hi_) < 0) { hi2 = &b.hi_; lo2 = &a.hi_; }
    mpfr_sub(d, *lo2, *hi2, MPFR_RNDU);
    mpfr_exp(d, d, MPFR_RNDU);
    mpfr_log1p(d, d, MPFR_RNDU);
    mpfr_add(r.hi_, *hi2, d, MPFR_RNDU);
    mpfr_clears(d, t, static_cast<mpfr_ptr>(nullptr));
    return r;
}

UpperReal operator+(const UpperReal& a, const UpperReal& b) { return log_sum_exp(a, b); }

UpperReal UpperReal::pow_ui(unsigned long e) const {
    UpperReal r;
    if (e == 0) {
        mpfr_set_zero(r.lo_, 0);
        mpfr_set_zero(r.hi_, 0);
        return r;  // value 1
    }
    if (is_zero()) return r;
    mpfr_mul_ui(r.lo_, lo_, e, MPFR_RNDD);
    mpfr_mul_ui(r.hi_, hi_, e, MPFR_RNDU);
    return r;
}

UpperReal UpperReal::sqrt_value() const {
    UpperReal r;
    if (is_zero()) return r;
    mpfr_div_ui(r.lo_, lo_, 2, MPFR_RNDD);
    mpfr_div_ui(r.hi_, hi_, 2, MPFR_RNDU);
    return r;
}

UpperReal UpperReal::log_value() const {
    UpperReal r;
    if (is_zero()) throw std::domain_error("UpperReal: log of zero");
    if (mpfr_sgn(hi_) == 0 && mpfr_sgn(lo_) == 0) return r;  // value exactly 1
    if (mpfr_sgn(lo_) < 0)
        throw std::domain_error("UpperReal: log_value requires value >= 1");
    mpfr_log(r.lo_, lo_, MPFR_RNDD);
    mpfr_log(r.hi_, hi_, MPFR_RNDU);
    return r;
}

UpperReal UpperReal::at_least_two() const {
    return max(*this, from_ui(2));
}

UpperReal UpperReal::max(const UpperReal& a, const UpperReal& b) {
    UpperReal r;
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

double UpperReal::log_upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }
double UpperReal::log_lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }

double UpperReal::log_width() const {
    mpfr_t d;
    mpfr_init2(d, g_precision.load());
    mpfr_sub(d, hi_, lo_, MPFR_RNDU);
    double w = mpfr_get_d(d, MPFR_RNDU);
    mpfr_clear(d);
    return w;
}

bool UpperReal::certified_leq(const UpperReal& other) const {
    if (is_zero()) return true;
    if (other.is_zero()) return false;
    return mpfr_cmp(hi_, other.lo_) <= 0;
}

bool UpperReal::certified_lt(const UpperReal& other) const {
    if (other.is_zero()) return false;
    if (is_zero()) return true;
    return mpfr_cmp(hi_, other.lo_) < 0;
}

std::string UpperReal::log_string(int digits) const {
    if (is_zero()) return "-inf";
    std::ostringstream os;
    os.precision(digits);
    os << (log_lower() + log_upper()) / 2;
    return os.str();
}

std::string UpperReal::decimal_scientific(int digits) const {
    if (is_zero()) return "0";
    // value = 10^(log10): mantissa from the fractional part
    const unsigned prec = g_precision.load();
    mpfr_t l10, fl;
    mpfr_inits2(prec, l10, fl, static_cast<mpfr_ptr>(nullptr));
    mpfr_set(l10, hi_, MPFR_RNDN);
    mpfr_add(l10, l10, lo_, MPFR_RNDN);
    mpfr_div_ui(l10, l10, 2, MPFR_RNDN);
    mpfr_t ln10;
    mpfr_init2(ln10, prec);
    mpfr_set_ui(ln10, 10, MPFR_RNDN);
    mpfr_log(ln10, ln10, MPFR_RNDN);
    mpfr_div(l10, l10, ln10, MPFR_RNDN);
    mpfr_floor(fl, l10);
    long expo = mpfr_get_si(fl, MPFR_RNDN);
    mpfr_sub(l10, l10, fl, MPFR_RNDN);
    mpfr_ui_pow(l10, 10, l10, MPFR_RNDN);
    double mant = mpfr_get_d(l10, MPFR_RNDN);
    mpfr_clears(l10, fl, ln10, static_cast<mpfr_ptr>(nullptr));
    std::ostringstream os;
    os.precision(digits);
    os << std::fixed << mant << "e" << (expo >= 0 ? "+" : "") << expo;
    return os.str();
}

void UpperReal::get_log_bounds(mpfr_t lo_out, mpfr_t hi_out) const {
    mpfr_set(lo_out, lo_, MPFR_RNDD);
    mpfr_set(hi_out, hi_, MPFR_RNDU);
}

}  // namespace repq
