#include "repq/bounds.hpp"

#include <cmath>

namespace repq {

UpperReal regulator_value(const FieldInvariants& inv) {
    if (!inv.fd.real()) return UpperReal();  // zero
    const unsigned prec = UpperReal::default_precision();
    mpfr_t lo, hi, s, t;
    mpfr_inits2(prec, lo, hi, s, t, static_cast<mpfr_ptr>(nullptr));
    for (int dir = 0; dir < 2; ++dir) {
        mpfr_rnd_t rnd = dir ? MPFR_RNDU : MPFR_RNDD;
        mpfr_set_ui(s, static_cast<unsigned long>(inv.fd.D), rnd);
        mpfr_sqrt(s, s, rnd);
        mpfr_set_z(t, inv.eps.b.get_mpz_t(), rnd);
        mpfr_mul(s, s, t, rnd);
        mpfr_set_z(t, inv.eps.a.get_mpz_t(), rnd);
        mpfr_add(s, s, t, rnd);
        mpfr_div_ui(s, s, 2, rnd);
        mpfr_log(s, s, rnd);  // R = log eps
        mpfr_log(s, s, rnd);  // bracket of log R, since the stored form is log(value)
        mpfr_set(dir ? hi : lo, s, rnd);
    }
    UpperReal r = UpperReal::from_log_bounds(lo, hi);
    mpfr_clears(lo, hi, s, t, static_cast<mpfr_ptr>(nullptr));
    return r;
}

BoundInputs bound_inputs_for(unsigned long q, const Natural& A,
                             const std::vector<Natural>& m_list) {
    FieldInvariants inv = field_invariants(q);
    BoundInputs in;
    in.q = q;
    in.A = A;
    in.m_list = m_list;
    in.h = inv.h;
    in.R = regulator_value(inv);
    return in;
}

Natural c2_exact(unsigned m) {
    if (m < 1) throw std::invalid_argument("c2: m must be >= 1");
    Natural p38, pm;
    mpz_ui_pow_ui(p38.get_mpz_t(), 38, m + 1);
    mpz_ui_pow_ui(pm.get_mpz_t(), m + 1, 3 * m + 9);
    return Natural(1500) * p38 * pm;
}

UpperReal c2_value(unsigned m) { return UpperReal::from_integer(c2_exact(m)); }

Natural c7_exact() {
    Natural c = 4096;          // 2^12
    c *= 38 * 38;
    c *= Natural(1500) * 1500;
    return c;
}

double at_least_two(double x) { return x > 2 ? x : 2.0; }

namespace {

void validate_m_list(const std::vector<Natural>& m_list) {
    if (m_list.empty()) throw std::invalid_argument("bounds: m_list must be nonempty");
    for (size_t i = 0; i < m_list.size(); ++i) {
        if (m_list[i] < 2) throw std::invalid_argument("bounds: each m_i must be >= 2");
        if (i && m_list[i] <= m_list[i - 1])
            throw std::invalid_argument("bounds: m_list must be strictly ascending");
    }
}

UpperReal a_prime_from(const Natural& A, const std::vector<Natural>& m_list, unsigned h) {
    Natural ap = A;
    for (const auto& m : m_list) {
        Natural pk;
        mpz_pow_ui(pk.get_mpz_t(), m.get_mpz_t(), h - 1);
        ap *= pk;
    }
    return UpperReal::from_integer(ap);
}

struct BranchSet {
    UpperReal t[3];
    int count;
};

BoundResult assemble(const BranchSet& bs, bool real_case, const UpperReal& c_big,
                     const UpperReal& a_prime, unsigned h) {
    BoundResult out;
    out.real_case = real_case;
    out.c_big = c_big;
    out.a_prime = a_prime;
    int best_i = 0;
    for (int i = 1; i < bs.count; ++i)
        if (bs.t[i].log_upper() > bs.t[best_i].log_upper()) best_i = i;
    out.term[0] = bs.t[0];
    out.term[1] = bs.t[1];
    out.term[2] = bs.t[2];
    UpperReal u = UpperReal::max(UpperReal::max(bs.t[0], bs.t[1]), bs.t[2]);
    if (h > 1) u = u + UpperReal::from_ui(h - 1);
    out.U = u;
    out.branch = best_i == 0 ? (real_case ? BoundBranch::MsTerm : BoundBranch::QTerm)
               : best_i == 1 ? (real_case ? BoundBranch::QTerm : BoundBranch::BakerTerm)
                             : BoundBranch::BakerTerm;
    return out;
}

// Shared core of the two theorem evaluators.  D > 0:
//   max{ h^2 log(2 c0 ms^(1/2)) / (c1 log m1),
//        log(c0 |D|^(1/2)) / (c1 log m1),
//        C2 <log A' + 2R> log(2s(s+2) C2 / h) }
// D < 0:
//   max{ log(c0 |D|^(1/2)) / (c1 log m1),
//        C3 <log A'> log((s+1) C3 / h) }
// with C2 = 2^4 c2(s+2)/c1 <R>(1 + 2R/log m1) prod_{i>=2}(log m_i + 2R)
// and  C3 = 2^6 c2(s+1)/(c1 log 7) prod_{i>=2} log m_i;  h-1 is added in both.
BoundResult form_bound(long D, const UpperReal& c0, const UpperReal& c1,
                       const std::vector<Natural>& m_list, unsigned h, const UpperReal& R,
                       const UpperReal& a_prime) {
    validate_m_list(m_list);
    const size_t s = m_list.size();
    const Natural absD(D > 0 ? D : -D);
    const UpperReal log_m1 = UpperReal::from_integer(m_list.front()).log_value();
    const UpperReal h_val = UpperReal::from_ui(h);
    const UpperReal log_a_prime =
        a_prime.is_zero() ? UpperReal() : a_prime.log_value();

    BranchSet bs;
    UpperReal c_big;
    if (D > 0) {
        const UpperReal ms_half = UpperReal::from_integer(m_list.back()).sqrt_value();
        bs.t[0] = h_val * h_val * (c0 * ms_half * UpperReal::from_ui(2)).log_value() /
                  (c1 * log_m1);
        bs.t[1] = (c0 * UpperReal::from_integer(absD).sqrt_value()).log_value() / (c1 * log_m1);
        const UpperReal two_r = R * UpperReal::from_ui(2);
        UpperReal prod = UpperReal::from_ui(16) * c2_value(static_cast<unsigned>(s) + 2) / c1;
        prod = prod * R.at_least_two();
        prod = prod * (UpperReal::from_ui(1) + two_r / log_m1);
        for (size_t i = 1; i < s; ++i)
            prod = prod * (UpperReal::from_integer(m_list[i]).log_value() + two_r);
        c_big = prod;
        const UpperReal hull = (log_a_prime + two_r).at_least_two();
        const UpperReal logarg =
            (UpperReal::from_ui(2 * s * (s + 2)) * c_big / h_val).log_value();
        bs.t[2] = c_big * hull * logarg;
        bs.count = 3;
    } else {
        bs.t[0] = (c0 * UpperReal::from_integer(absD).sqrt_value()).log_value() / (c1 * log_m1);
        UpperReal prod = UpperReal::from_ui(64) * c2_value(static_cast<unsigned>(s) + 1) /
                         (c1 * UpperReal::from_ui(7).log_value());
        for (size_t i = 1; i < s; ++i)
            prod = prod * UpperReal::from_integer(m_list[i]).log_value();
        c_big = prod;
        const UpperReal hull = log_a_prime.at_least_two();
        const UpperReal logarg =
            (UpperReal::from_ui(s + 1) * c_big / h_val).log_value();
        bs.t[1] = c_big * hull * logarg;
        bs.t[2] = UpperReal();  // unused
        bs.count = 2;
    }
    return assemble(bs, D > 0, c_big, a_prime, h);
}

}  // namespace

UpperReal a_prime_worst(const BoundInputs& in) {
    validate_m_list(in.m_list);
    return a_prime_from(in.A, in.m_list, in.h);
}

BoundResult theorem1_bound(const BoundInputs& in) {
    validate_m_list(in.m_list);
    Natural ap = in.A;
    for (const auto& m : in.m_list) {
        Natural pk;
        mpz_pow_ui(pk.get_mpz_t(), m.get_mpz_t(), in.h - 1);
        ap *= pk;
    }
    return theorem1_bound_with_aprime(in, ap);
}

BoundResult theorem1_bound_with_aprime(const BoundInputs& in, const Natural& a_prime) {
    validate_m_list(in.m_list);
    const long D = (in.q % 4 == 1) ? static_cast<long>(in.q) : -static_cast<long>(in.q);
    const size_t s = in.m_list.size();
    const UpperReal q_val = UpperReal::from_ui(in.q);
    const UpperReal log_m1 = UpperReal::from_integer(in.m_list.front()).log_value();
    const UpperReal h_val = UpperReal::from_ui(in.h);
    const UpperReal ap_val = UpperReal::from_integer(a_prime);
    const UpperReal log_ap = ap_val.is_zero() ? UpperReal() : ap_val.log_value();

    BranchSet bs;
    UpperReal c_big;
    if (D > 0) {
        // (1.1a): q h^2 log(4 ms^(1/2))/log m1, q log(2 q^(1/2))/log m1, C0-term
        bs.t[0] = q_val * h_val * h_val *
                  (UpperReal::from_ui(4) * UpperReal::from_integer(in.m_list.back()).sqrt_value())
                      .log_value() /
                  log_m1;
        bs.t[1] = q_val * (UpperReal::from_ui(2) * q_val.sqrt_value()).log_value() / log_m1;
        const UpperReal two_r = in.R * UpperReal::from_ui(2);
        UpperReal c0c = UpperReal::from_ui(16) * q_val * c2_value(static_cast<unsigned>(s) + 2);
        c0c = c0c * in.R.at_least_two();
        c0c = c0c * (UpperReal::from_ui(1) + two_r / log_m1);
        for (size_t i = 1; i < s; ++i)
            c0c = c0c * (UpperReal::from_integer(in.m_list[i]).log_value() + two_r);
        c_big = c0c;
        bs.t[2] = c_big * (log_ap + two_r).at_least_two() *
                  (UpperReal::from_ui(2 * s * (s + 2)) * c_big / h_val).log_value();
        bs.count = 3;
    } else {
        // (1.1b): q log(2 q^(1/2))/log m1, C1-term
        bs.t[0] = q_val * (UpperReal::from_ui(2) * q_val.sqrt_value()).log_value() / log_m1;
        UpperReal c1c = UpperReal::from_ui(64) * q_val *
                        c2_value(static_cast<unsigned>(s) + 1) / UpperReal::from_ui(7).log_value();
        for (size_t i = 1; i < s; ++i)
            c1c = c1c * UpperReal::from_integer(in.m_list[i]).log_value();
        c_big = c1c;
        bs.t[1] = c_big * log_ap.at_least_two() *
                  (UpperReal::from_ui(s + 1) * c_big / h_val).log_value();
        bs.t[2] = UpperReal();
        bs.count = 2;
    }
    return assemble(bs, D > 0, c_big, ap_val, in.h);
}

BoundResult theorem2_bound(long D, const Natural& A, const UpperReal& c0, const UpperReal& c1,
                           const std::vector<Natural>& m_list, unsigned h, const UpperReal& R) {
    if (((D % 4) + 4) % 4 != 1) throw std::invalid_argument("theorem2: D must be 1 mod 4");
    if (!c1.certified_lt(UpperReal::from_ratio_ui(1, 2)) || c1.is_zero())
        throw std::invalid_argument("theorem2: c1 must lie in (0, 1/2)");
    validate_m_list(m_list);
    Natural ap = A;
    for (const auto& m : m_list) {
        Natural pk;
        mpz_pow_ui(pk.get_mpz_t(), m.get_mpz_t(), h - 1);
        ap *= pk;
    }
    return form_bound(D, c0, c1, m_list, h, R, UpperReal::from_integer(ap));
}

UpperReal simple_log_U(unsigned long q, const std::vector<Natural>& m_list) {
    validate_m_list(m_list);
    const size_t s = m_list.size();
    UpperReal acc = UpperReal::from_integer(c7_exact()).log_value();
    acc = acc + UpperReal::from_ui(2 * s) * UpperReal::from_ui(38).log_value();
    acc = acc + UpperReal::from_ui(6 * s + 4) * UpperReal::from_ui(s + 2).log_value();
    UpperReal three = UpperReal::from_ui(3);
    for (size_t i = 1; i < s; ++i)
        acc = acc + three * UpperReal::from_integer(m_list[i]).log_value().log_value();
    acc = acc + UpperReal::from_ui(5) * UpperReal::from_ui(q).log_value();
    return acc;
}

CountBound theorem4_count_bound(unsigned long q, const std::vector<Natural>& m_list) {
    validate_m_list(m_list);
    const size_t s = m_list.size();
    UpperReal num = UpperReal::from_integer(c7_exact()).log_value();
    num = num + UpperReal::from_ui(19 * s) * UpperReal::from_ui(s + 2).log_value();
    for (size_t i = 1; i < s; ++i)
        num = num + UpperReal::from_ui(3) * UpperReal::from_integer(m_list[i]).log_value().log_value();
    UpperReal inner = num / UpperReal::from_ui(q).log_value() + UpperReal::from_ui(7);
    CountBound out;
    out.bound = UpperReal::from_ui(s) * inner;
    // q > (16/9) e s^4, certified with an upper bracket of the threshold
    const unsigned prec = UpperReal::default_precision();
    mpfr_t thr;
    mpfr_init2(thr, prec);
    mpfr_set_ui(thr, 1, MPFR_RNDU);
    mpfr_exp(thr, thr, MPFR_RNDU);  // e
    mpfr_mul_ui(thr, thr, 16, MPFR_RNDU);
    mpfr_div_ui(thr, thr, 9, MPFR_RNDU);
    mpfr_mul_ui(thr, thr, s * s * s * s, MPFR_RNDU);
    out.applicable = is_prime(Natural(q)) && mpfr_cmp_ui(thr, q) < 0;
    mpfr_clear(thr);
    return out;
}

Prop1Result prop1_lower_bound(unsigned m, unsigned k, const std::vector<UpperReal>& h_list,
                              const UpperReal& B) {
    if (m < 2) throw std::invalid_argument("prop1: m must be >= 2");
    if (h_list.size() != m) throw std::invalid_argument("prop1: need m height values");
    Prop1Result out;
    // (2.3): 7 + 3 log(m+1) >= log k
    UpperReal lhs23 = UpperReal::from_ui(7) + UpperReal::from_ui(3) * UpperReal::from_ui(m + 1).log_value();
    UpperReal log_k = k == 1 ? UpperReal() : UpperReal::from_ui(k).log_value();
    out.cond_degree_ok = log_k.certified_leq(lhs23);
    // (2.2): B >= h_m * exp(4(m+1)(7 + 3 log(m+1)))
    UpperReal expo = UpperReal::from_ui(4 * (m + 1)) * lhs23;
    // e^expo: move through log domain (log of threshold = log h_m + expo-as-value)
    const unsigned prec = UpperReal::default_precision();
    mpfr_t lo, hi, t;
    mpfr_inits2(prec, lo, hi, t, static_cast<mpfr_ptr>(nullptr));
    // threshold = h_m * exp(E): log threshold = log h_m + E
    // E is a value; extract its brackets via exp of its log brackets
    mpfr_set_d(lo, expo.log_lower(), MPFR_RNDD);
    mpfr_exp(lo, lo, MPFR_RNDD);
    mpfr_set_d(hi, expo.log_upper(), MPFR_RNDU);
    mpfr_exp(hi, hi, MPFR_RNDU);
    // add log(h_m) brackets
    mpfr_set_d(t, h_list.back().log_lower(), MPFR_RNDD);
    mpfr_add(lo, lo, t, MPFR_RNDD);
    mpfr_set_d(t, h_list.back().log_upper(), MPFR_RNDU);
    mpfr_add(hi, hi, t, MPFR_RNDU);
    out.b_threshold = UpperReal::from_log_bounds(lo, hi);
    mpfr_clears(lo, hi, t, static_cast<mpfr_ptr>(nullptr));
    out.cond_height_ok = out.b_threshold.certified_leq(B);
    out.applicable = out.cond_degree_ok && out.cond_height_ok;
    // magnitude = c2(m) k^(m+2) prod h_i log(2mB/h_m)
    UpperReal mag = c2_value(m) * UpperReal::from_ui(k).pow_ui(m + 2);
    for (const auto& hv : h_list) mag = mag * hv;
    mag = mag * (UpperReal::from_ui(2 * m) * B / h_list.back()).log_value();
    out.magnitude = mag;
    return out;
}

double theorem3_rhs(unsigned long q, double eps, const Natural& x) {
    if (x < 3) throw std::invalid_argument("theorem3_rhs: x must be >= 3");
    const double coeff = (static_cast<double>(q) - 1.0) / 6.0;
    if (eps < 0 || eps >= coeff)
        throw std::invalid_argument("theorem3_rhs: eps must lie in [0, (q-1)/6)");
    long e2;
    double mant = mpz_get_d_2exp(&e2, x.get_mpz_t());
    double logx = std::log(mant) + static_cast<double>(e2) * std::log(2.0);
    return (coeff - eps) * std::log(logx);
}

UpperReal bhm_comparator(unsigned long q) {
    if (q < 3) throw std::invalid_argument("bhm_comparator: q must be >= 3");
    UpperReal lq = UpperReal::from_ui(q).log_value();
    return UpperReal::from_ui(9000) * UpperReal::from_ui(q).pow_ui(2) * lq.pow_ui(4);
}

}  // namespace repq
