#include "repq/cyclotomic.hpp"

#include <cmath>

namespace repq {

namespace {

// |(a + b sqrt(D))/2| <= bound under both real embeddings (D > 0) or in
// complex modulus (D < 0), decided exactly in integers.
bool qi_abs_leq(const QuadInt& z, const Natural& bound) {
    if (z.D < 0) {
        // (a^2 + |D| b^2)/4 <= bound^2
        return z.a * z.a + Natural(-z.D) * z.b * z.b <= 4 * bound * bound;
    }
    // both embeddings: (a ± b sqrt(D))^2 <= 4 bound^2, i.e. ab2*sqrt(D) <= t
    for (int s : {+1, -1}) {
        Natural ab2 = 2 * z.a * z.b * s;
        Natural t = 4 * bound * bound - z.a * z.a - Natural(z.D) * z.b * z.b;
        if (ab2 <= 0) {
            if (t >= 0) continue;
            if (ab2 * ab2 * z.D >= t * t) continue;  // |ab2| sqrt(D) >= |t|
            return false;
        }
        if (t < 0) return false;
        if (ab2 * ab2 * z.D > t * t) return false;
    }
    return true;
}

double log_abs_qi(const QuadInt& z) {
    double ad = std::fabs(z.a.get_d()), bd = std::fabs(z.b.get_d());
    double sD = std::sqrt(std::fabs(static_cast<double>(z.D)));
    if (z.D < 0) return 0.5 * std::log((ad * ad + bd * bd * sD * sD) / 4.0);
    return std::log(std::max(std::fabs(z.a.get_d() + z.b.get_d() * sD),
                             std::fabs(z.a.get_d() - z.b.get_d() * sD)) /
                    2.0);
}

double log_abs_z(const Natural& n) {
    if (n == 0) return -1e300;
    long e;
    double m = mpz_get_d_2exp(&e, n.get_mpz_t());
    return std::log(std::fabs(m)) + e * std::log(2.0);
}

}  // namespace

HalfSplit half_split(unsigned long q, unsigned long degree_cap) {
    FieldDescriptor fd = field_descriptor(q);  // validates q
    if (q > degree_cap)
        throw std::invalid_argument("half_split: q exceeds the configured degree cap");

    // quadratic residues mod q
    std::vector<char> is_qr(q, 0);
    for (unsigned long m = 1; m < q; ++m) is_qr[(m * m) % q] = 1;

    // P+ coefficients as vectors over the basis zeta^0..zeta^{q-1}
    // (only defined up to adding multiples of (1,...,1); the projection below
    // is invariant under that shift)
    using Vec = std::vector<Natural>;
    std::vector<Vec> poly;
    poly.emplace_back(q, Natural(0));
    poly[0][0] = 1;
    for (unsigned long m = 1; m < q; ++m) {
        if (!is_qr[m]) continue;
        std::vector<Vec> next(poly.size() + 1, Vec(q, Natural(0)));
        for (size_t i = 0; i < poly.size(); ++i) {
            for (unsigned long j = 0; j < q; ++j) {
                const Natural& c = poly[i][j];
                if (c == 0) continue;
                next[i + 1][j] += c;           // multiply by x
                next[i][(j + m) % q] -= c;     // multiply by -zeta^m
            }
        }
        poly = std::move(next);
    }

    const size_t deg = (q - 1) / 2;
    if (poly.size() != deg + 1) throw std::logic_error("half_split: degree mismatch");

    HalfSplit hs;
    hs.q = q;
    hs.D = fd.D;
    std::vector<Natural> f(deg + 1), g_raw(deg + 1);
    for (size_t k = 0; k <= deg; ++k) {
        const Vec& vec = poly[deg - k];  // leading first
        Natural u, v;
        bool u_set = false, v_set = false;
        for (unsigned long j = 1; j < q; ++j) {
            if (is_qr[j]) {
                if (!u_set) { u = vec[j]; u_set = true; }
                else if (vec[j] != u)
                    throw std::logic_error("half_split: coefficient not in the subfield");
            } else {
                if (!v_set) { v = vec[j]; v_set = true; }
                else if (vec[j] != v)
                    throw std::logic_error("half_split: coefficient not in the subfield");
            }
        }
        Natural a = 2 * vec[0] - u - v;
        Natural b = u - v;
        if (mpz_odd_p(Natural(a - b).get_mpz_t()))
            throw std::logic_error("half_split: projection left the half-integer order");
        hs.a_coeffs.emplace_back(a, b, fd.D);
        f[k] = a;
        g_raw[k] = b;
    }
    if (g_raw[0] != 0) throw std::logic_error("half_split: g has full degree");
    if (f[0] != 2) throw std::logic_error("half_split: f is not 2*monic");

    hs.f_coeffs = std::move(f);
    hs.g_coeffs.assign(g_raw.begin() + 1, g_raw.end());
    if (!hs.g_coeffs.empty() && hs.g_coeffs[0] < 0) {
        // fix the sign of sqrt(D): swap P+ <-> P- (conjugate a_coeffs, negate g)
        for (auto& c : hs.a_coeffs) c = c.conj();
        for (auto& c : hs.g_coeffs) c = -c;
    }
    if (hs.g_coeffs.empty() || (hs.g_coeffs[0] != 1))
        throw std::logic_error("half_split: leading g coefficient is not a unit");
    return hs;
}

namespace {

Natural horner(const std::vector<Natural>& coeffs, const Natural& x) {
    Natural acc = 0;
    for (const auto& c : coeffs) acc = acc * x + c;
    return acc;
}

}  // namespace

Natural eval_f(const HalfSplit& hs, const Natural& x) { return horner(hs.f_coeffs, x); }
Natural eval_g(const HalfSplit& hs, const Natural& x) { return horner(hs.g_coeffs, x); }

GrowthReport growth_check(const HalfSplit& hs, const Natural& x) {
    // x >= ceil(q^{3/2})  <=>  x^2 >= q^3  (x integer, q^{3/2} irrational)
    Natural q(static_cast<unsigned long>(hs.q));
    if (x * x < q * q * q)
        throw std::invalid_argument("growth_check: requires x >= q^(3/2)");
    GrowthReport rep;
    Natural gx = eval_g(hs, x);
    rep.g_abs = abs(gx);
    Natural xpow;
    mpz_pow_ui(xpow.get_mpz_t(), x.get_mpz_t(), (hs.q - 3) / 2);
    rep.poly_bound = 2 * xpow;
    rep.poly_bound_ok = rep.g_abs <= rep.poly_bound;
    // |g(x)|^{2(q-1)} < 2^{2(q-1)} * RQ^{q-3}, the exact form of (1.2b) with
    // (c0, c1) = (2, 1/q)
    Natural rq = repunit_quotient(x, static_cast<unsigned>(hs.q));
    Natural lhs, rhs, rqp;
    mpz_pow_ui(lhs.get_mpz_t(), rep.g_abs.get_mpz_t(), 2 * (hs.q - 1));
    mpz_pow_ui(rqp.get_mpz_t(), rq.get_mpz_t(), hs.q - 3);
    mpz_ui_pow_ui(rhs.get_mpz_t(), 2, 2 * (hs.q - 1));
    rhs *= rqp;
    rep.cond_12b_ok = lhs < rhs;
    rep.margin_log = log_abs_z(rep.poly_bound) - log_abs_z(rep.g_abs);
    return rep;
}

CoefficientBoundsReport coefficient_bounds_check(const HalfSplit& hs) {
    CoefficientBoundsReport rep;
    rep.ok = true;
    rep.b0_is_unit = !hs.g_coeffs.empty() && abs(hs.g_coeffs[0]) == 1;
    rep.worst_a_margin_log = 1e300;
    rep.worst_b_margin_log = 1e300;
    if (!rep.b0_is_unit) rep.ok = false;
    Natural q(static_cast<unsigned long>(hs.q));
    Natural qi = 1;
    for (size_t i = 0; i < hs.a_coeffs.size(); ++i) {
        if (!qi_abs_leq(hs.a_coeffs[i], qi)) rep.ok = false;
        double margin = static_cast<double>(i) * std::log(static_cast<double>(hs.q)) -
                        log_abs_qi(hs.a_coeffs[i]);
        rep.worst_a_margin_log = std::min(rep.worst_a_margin_log, margin);
        qi *= q;
    }
    // |b_i| <= q^{i+1/2}/2  <=>  4 b_i^2 <= q^{2i+1}
    for (size_t i = 0; i < hs.g_coeffs.size(); ++i) {
        Natural qp;
        mpz_pow_ui(qp.get_mpz_t(), q.get_mpz_t(), 2 * i + 1);
        if (4 * hs.g_coeffs[i] * hs.g_coeffs[i] > qp) rep.ok = false;
        double margin = (i + 0.5) * std::log(static_cast<double>(hs.q)) - std::log(2.0) -
                        log_abs_z(hs.g_coeffs[i]);
        rep.worst_b_margin_log = std::min(rep.worst_b_margin_log, margin);
        // observed ratio |b_i| * 2 sqrt(q) / |a_{i+1}| (the paper states this as
        // an equality; recorded for inspection)
        double la = log_abs_qi(hs.a_coeffs[i + 1]);
        rep.b_ratio_obs.push_back(std::exp(log_abs_z(hs.g_coeffs[i]) +
                                           std::log(2.0 * std::sqrt(double(hs.q))) - la));
    }
    return rep;
}

bool identity_check(const HalfSplit& hs) {
    const size_t df = hs.f_coeffs.size(), dg = hs.g_coeffs.size();
    std::vector<Natural> lhs(2 * df - 1, Natural(0));
    for (size_t i = 0; i < df; ++i)
        for (size_t j = 0; j < df; ++j) lhs[i + j] += hs.f_coeffs[i] * hs.f_coeffs[j];
    for (size_t i = 0; i < dg; ++i)
        for (size_t j = 0; j < dg; ++j)
            lhs[i + j + (2 * df - 2 * dg)] -= Natural(hs.D) * hs.g_coeffs[i] * hs.g_coeffs[j];
    // expect 4 * (x^{q-1} + ... + 1)
    for (const auto& c : lhs)
        if (c != 4) return false;
    return lhs.size() == hs.q - 1 + 1;
}

}  // namespace repq
