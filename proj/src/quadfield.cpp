#include "repq/quadfield.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <tuple>

#include <mpfr.h>

namespace repq {

FieldDescriptor field_descriptor(unsigned long q) {
    if (q < 3 || q % 2 == 0 || !is_prime(Natural(q)))
        throw std::invalid_argument("q must be an odd prime");
    long D = (q % 4 == 1) ? static_cast<long>(q) : -static_cast<long>(q);
    return FieldDescriptor{D};
}

QuadInt::QuadInt(Natural a_, Natural b_, long D_) : a(std::move(a_)), b(std::move(b_)), D(D_) {
    if (mpz_odd_p(Natural(a - b).get_mpz_t()))
        throw std::logic_error("QuadInt: a and b must have equal parity");
}

Natural QuadInt::norm() const {
    Natural n = a * a - Natural(D) * b * b;
    if (!mpz_divisible_ui_p(n.get_mpz_t(), 4)) throw std::logic_error("QuadInt: bad norm");
    return n / 4;
}

QuadInt QuadInt::operator*(const QuadInt& o) const {
    if (D != o.D) throw std::logic_error("QuadInt: mixed discriminants");
    Natural na = a * o.a + Natural(D) * b * o.b;
    Natural nb = a * o.b + b * o.a;
    if (mpz_odd_p(na.get_mpz_t()) || mpz_odd_p(nb.get_mpz_t()))
        throw std::logic_error("QuadInt: product left the order");
    return QuadInt(na / 2, nb / 2, D);
}

QuadInt QuadInt::pow(unsigned long e) const {
    QuadInt r = qi_one(D), base = *this;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

int QuadInt::sign_real() const {
    if (D < 0) throw std::logic_error("sign_real: imaginary field");
    int sa = mpz_sgn(a.get_mpz_t()), sb = mpz_sgn(b.get_mpz_t());
    if (sa == 0 && sb == 0) return 0;
    if (sa >= 0 && sb >= 0) return 1;
    if (sa <= 0 && sb <= 0) return -1;
    // opposite signs: compare a^2 against D b^2 (sqrt(D) irrational, never equal)
    Natural lhs = a * a, rhs = Natural(D) * b * b;
    if (sa > 0) return lhs > rhs ? 1 : -1;
    return lhs > rhs ? -1 : 1;
}

bool QuadInt::divisible_by_int(const Natural& n) const {
    if (n == 0) return false;
    if (!mpz_divisible_p(a.get_mpz_t(), n.get_mpz_t()) ||
        !mpz_divisible_p(b.get_mpz_t(), n.get_mpz_t()))
        return false;
    Natural ha = a / n, hb = b / n;
    return mpz_even_p(Natural(ha - hb).get_mpz_t());
}

QuadInt qi_one(long D) { return QuadInt(2, 0, D); }

int cmp_real(const QuadInt& x, const QuadInt& y) {
    if (x.D != y.D) throw std::logic_error("cmp_real: mixed discriminants");
    return QuadInt(x.a - y.a, x.b - y.b, x.D).sign_real();
}

std::optional<QuadInt> divide_exact(const QuadInt& x, const QuadInt& y) {
    Natural n = y.norm();
    if (n == 0) return std::nullopt;
    QuadInt z = x * y.conj();
    if (!mpz_divisible_p(z.a.get_mpz_t(), n.get_mpz_t()) ||
        !mpz_divisible_p(z.b.get_mpz_t(), n.get_mpz_t()))
        return std::nullopt;
    Natural qa = z.a / n, qb = z.b / n;
    if (mpz_odd_p(Natural(qa - qb).get_mpz_t())) return std::nullopt;
    return QuadInt(qa, qb, x.D);
}

std::vector<QuadInt> FieldInvariants::torsion_units() const {
    const long D = fd.D;
    if (torsion_order == 6)
        return {QuadInt(2, 0, D),  QuadInt(1, 1, D),   QuadInt(-1, 1, D),
                QuadInt(-2, 0, D), QuadInt(-1, -1, D), QuadInt(1, -1, D)};
    return {QuadInt(2, 0, D), QuadInt(-2, 0, D)};
}

namespace {

// ---- class numbers ---------------------------------------------------------

unsigned count_reduced_imaginary(long D) {
    // reduced primitive forms (a,b,c), b^2-4ac=D<0, |b| <= a <= c, b > 0 when
    // |b| = a or a = c.  D = -q prime, so primitivity is automatic.
    unsigned count = 0;
    for (long a = 1; 3 * a * a <= -D; ++a) {
        for (long b = -a; b <= a; ++b) {
            if ((b - D) % 2 != 0) continue;
            long num = b * b - D;
            if (num % (4 * a)) continue;
            long c = num / (4 * a);
            if (c < a) continue;
            if (b < 0 && (-b == a || a == c)) continue;
            ++count;
        }
    }
    return count;
}

struct RealForm {
    long a, b, c;
    auto operator<=>(const RealForm&) const = default;
};

std::set<RealForm> reduced_real_forms(long D) {
    std::set<RealForm> forms;
    long s = static_cast<long>(std::sqrt(static_cast<double>(D)));
    while (s * s > D) --s;
    while ((s + 1) * (s + 1) <= D) ++s;
    for (long b = 1; b <= s; ++b) {
        if ((b - D) % 2 != 0) continue;
        long num = D - b * b;  // > 0 since b <= s < sqrt(D)
        for (long aa = 1; 2 * aa <= s + b; ++aa) {
            if (num % (4 * aa)) continue;
            // reduced: sqrt(D) - b < 2|a| < sqrt(D) + b
            long t = 2 * aa + b;
            if (t * t <= D) continue;
            if (2 * aa > b && (2 * aa - b) * (2 * aa - b) >= D) continue;
            long c_abs = num / (4 * aa);
            forms.insert({aa, b, -c_abs});
            forms.insert({-aa, b, c_abs});
        }
    }
    return forms;
}

RealForm rho_step(const RealForm& f, long D, long s) {
    long cc = std::labs(f.c);
    long m = 2 * cc;
    // r ≡ -b (mod 2|c|), r in [s+1-2|c|, s]
    long r = ((-f.b) % m + m) % m;
    long lo = s + 1 - m;
    r = lo + ((r - lo) % m + m) % m;
    long c2 = (r * r - D) / (4 * f.c);
    return RealForm{f.c, r, c2};
}

unsigned count_cycles_real(long D) {
    auto forms = reduced_real_forms(D);
    long s = static_cast<long>(std::sqrt(static_cast<double>(D)));
    while (s * s > D) --s;
    while ((s + 1) * (s + 1) <= D) ++s;
    std::set<RealForm> seen;
    unsigned cycles = 0;
    for (const auto& f : forms) {
        if (seen.count(f)) continue;
        ++cycles;
        RealForm g = f;
        do {
            seen.insert(g);
            g = rho_step(g, D, s);
            if (!forms.count(g)) throw std::logic_error("rho left the reduced set");
        } while (!(g == f));
    }
    return cycles;
}

// ---- fundamental unit via the continued fraction of sqrt(D) ----------------

struct PellUnit {
    Natural x, y;  // x^2 - D y^2 = norm
    int norm;
};

PellUnit pell_unit(long D) {
    Natural nD(D);
    Natural s = isqrt(nD);
    Natural P = 0, Q = 1, a = s;
    Natural p_prev = 1, p_cur = a, q_prev = 0, q_cur = 1;
    unsigned long period = 0;
    for (unsigned long i = 1;; ++i) {
        Natural P2 = a * Q - P;
        Natural Q2 = (nD - P2 * P2) / Q;
        Natural a2 = (s + P2) / Q2;
        P = P2;
        Q = Q2;
        a = a2;
        if (Q == 1) {
            period = i;
            break;
        }
        Natural pn = a * p_cur + p_prev;
        Natural qn = a * q_cur + q_prev;
        p_prev = p_cur;
        p_cur = pn;
        q_prev = q_cur;
        q_cur = qn;
        if (i > 10'000'000) throw std::length_error("pell_unit: period too long");
    }
    return PellUnit{p_cur, q_cur, (period % 2 == 0) ? 1 : -1};
}

double log_qi(const QuadInt& u) {
    // log of the real embedding (a + b sqrt(D))/2; exact enough for rounding
    // small unit exponents and for reporting regulators
    double ad = u.a.get_d(), bd = u.b.get_d();
    double v = (ad + bd * std::sqrt(static_cast<double>(u.D))) / 2;
    if (std::isfinite(v) && v > 0) return std::log(v);
    // coordinates beyond double range: both are then positive and huge
    long ea = 0, eb = 0;
    double ma = mpz_get_d_2exp(&ea, u.a.get_mpz_t());
    double mb = mpz_get_d_2exp(&eb, u.b.get_mpz_t());
    const double l2 = std::log(2.0);
    double la = std::log(std::fabs(ma)) + ea * l2;
    double lb = std::log(std::fabs(mb)) + eb * l2 + 0.5 * std::log(static_cast<double>(u.D));
    double hi = std::max(la, lb), lo = std::min(la, lb);
    return hi + std::log1p(std::exp(lo - hi)) - l2;
}

// If eps1 = u^3 for a half-integer unit u, return it (index-3 refinement).
std::optional<QuadInt> cube_root_unit(const QuadInt& eps1, int norm1) {
    const long D = eps1.D;
    const mpfr_prec_t prec =
        static_cast<mpfr_prec_t>(mpz_sizeinbase(eps1.a.get_mpz_t(), 2)) + 96;
    mpfr_t t, sq, val, xr;
    mpfr_inits2(prec, t, sq, val, xr, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_ui(sq, static_cast<unsigned long>(D), MPFR_RNDN);
    mpfr_sqrt(sq, sq, MPFR_RNDN);
    mpfr_set_z(val, eps1.b.get_mpz_t(), MPFR_RNDN);
    mpfr_mul(val, val, sq, MPFR_RNDN);
    mpfr_set_z(t, eps1.a.get_mpz_t(), MPFR_RNDN);
    mpfr_add(val, val, t, MPFR_RNDN);
    mpfr_div_ui(val, val, 2, MPFR_RNDN);  // real embedding of eps1
    mpfr_cbrt(t, val, MPFR_RNDN);
    mpfr_ui_div(xr, 1, t, MPFR_RNDN);
    if (norm1 < 0) mpfr_neg(xr, xr, MPFR_RNDN);
    mpfr_add(xr, xr, t, MPFR_RNDN);  // X = t + norm/t
    Natural x0;
    mpfr_get_z(x0.get_mpz_t(), xr, MPFR_RNDN);
    mpfr_clears(t, sq, val, xr, static_cast<mpfr_ptr>(nullptr));
    for (long d = -2; d <= 2; ++d) {
        Natural X = x0 + d;
        if (X <= 0) continue;
        Natural tt = X * X - 4 * norm1;
        if (tt <= 0) continue;
        if (!mpz_divisible_ui_p(tt.get_mpz_t(), static_cast<unsigned long>(D))) continue;
        Natural y2 = tt / static_cast<unsigned long>(D);
        if (!is_perfect_square(y2)) continue;
        Natural Y = isqrt(y2);
        if (mpz_odd_p(Natural(X - Y).get_mpz_t())) continue;
        QuadInt u(X, Y, D);
        if (u.pow(3) == eps1) return u;
    }
    return std::nullopt;
}

}  // namespace

FieldInvariants field_invariants(unsigned long q) {
    FieldDescriptor fd = field_descriptor(q);
    FieldInvariants inv;
    inv.fd = fd;
    if (fd.D < 0) {
        inv.h = inv.h_narrow = count_reduced_imaginary(fd.D);
        inv.eps = qi_one(fd.D);
        inv.eps_norm = 1;
        inv.regulator = 0.0;
        inv.torsion_order = (fd.D == -3) ? 6 : 2;
    } else {
        PellUnit pu = pell_unit(fd.D);
        QuadInt eps1(2 * pu.x, 2 * pu.y, fd.D);
        int n1 = pu.norm;
        if (auto half = cube_root_unit(eps1, n1)) {
            inv.eps = *half;
            inv.eps_norm = static_cast<int>(mpz_get_si(inv.eps.norm().get_mpz_t()));
        } else {
            inv.eps = eps1;
            inv.eps_norm = n1;
        }
        inv.h_narrow = count_cycles_real(fd.D);
        inv.h = (inv.eps_norm == -1) ? inv.h_narrow : inv.h_narrow / 2;
        inv.regulator = log_qi(inv.eps);
        inv.torsion_order = 2;
    }
    const double cap = std::sqrt(static_cast<double>(q)) * std::log(4.0 * q);
    if (inv.h > cap || inv.regulator > cap)
        throw std::runtime_error("field_invariants: h,R sanity bound violated (data error)");
    return inv;
}

namespace {

Natural tonelli_shanks(const Natural& a_in, const Natural& p) {
    Natural a = a_in % p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    if (mpz_legendre(a.get_mpz_t(), p.get_mpz_t()) != 1)
        throw std::invalid_argument("tonelli_shanks: not a residue");
    if (p % 4 == 3) {
        Natural e = (p + 1) / 4, r;
        mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        return r;
    }
    Natural Q = p - 1;
    unsigned long S = mpz_scan1(Q.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(Q.get_mpz_t(), Q.get_mpz_t(), S);
    Natural z = 2;
    while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
    Natural M(static_cast<unsigned long>(S)), c, t, R;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), Q.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), Q.get_mpz_t(), p.get_mpz_t());
    Natural e0 = (Q + 1) / 2;
    mpz_powm(R.get_mpz_t(), a.get_mpz_t(), e0.get_mpz_t(), p.get_mpz_t());
    while (t != 1) {
        Natural tt = t;
        unsigned long i = 0;
        while (tt != 1) {
            mpz_powm_ui(tt.get_mpz_t(), tt.get_mpz_t(), 2, p.get_mpz_t());
            ++i;
        }
        Natural b = c;
        unsigned long Mi = mpz_get_ui(M.get_mpz_t());
        for (unsigned long k = 0; k + i + 1 < Mi; ++k)
            mpz_powm_ui(b.get_mpz_t(), b.get_mpz_t(), 2, p.get_mpz_t());
        M = Natural(static_cast<unsigned long>(i));
        c = b * b % p;
        t = t * c % p;
        R = R * b % p;
    }
    return R;
}

}  // namespace

PrimeIdealRep split_prime(const Natural& p, const FieldDescriptor& fd) {
    if (p < 3 || !is_prime(p)) throw std::invalid_argument("split_prime: p must be an odd prime");
    Natural D(fd.D);
    Natural Dmod = D % p;
    if (Dmod < 0) Dmod += p;
    if (Dmod == 0)
        throw std::invalid_argument("split_prime: p ramifies (p divides D)");
    if (mpz_legendre(Dmod.get_mpz_t(), p.get_mpz_t()) != 1)
        throw std::invalid_argument("split_prime: p is inert (D is a non-residue mod p)");
    Natural b0 = tonelli_shanks(Dmod, p);
    Natural best = 0;
    for (const Natural& r : {Natural(b0), Natural(p - b0)}) {
        Natural cand = mpz_odd_p(r.get_mpz_t()) ? r : r + p;  // odd representative mod 2p
        Natural chk = (cand * cand - D) % (4 * p);
        if (chk != 0) throw std::logic_error("split_prime: lift failed");
        if (best == 0 || cand < best) best = cand;
    }
    return PrimeIdealRep{p, best};
}

namespace {

bool is_primitive_qi(const QuadInt& x) {
    if (x.a == 0 && x.b == 0) return false;
    Natural g;
    mpz_gcd(g.get_mpz_t(), x.a.get_mpz_t(), x.b.get_mpz_t());
    Natural odd = g;
    while (odd > 1 && mpz_even_p(odd.get_mpz_t())) odd /= 2;
    if (odd > 1) return false;  // an odd prime divides both coordinates
    if (mpz_even_p(g.get_mpz_t()) && g > 0) {
        Natural ha = x.a / 2, hb = x.b / 2;
        if (mpz_even_p(Natural(ha - hb).get_mpz_t())) return false;  // divisible by 2
    }
    return true;
}

// Canonical representative of the orbit under torsion and conjugation:
// the (a,b) >= 0 member minimizing (b, a) lexicographically.
QuadInt canon_imaginary(const QuadInt& x, const FieldInvariants& inv) {
    std::optional<QuadInt> best;
    for (const auto& u : inv.torsion_units()) {
        for (const QuadInt& y : {u * x, u * x.conj()}) {
            if (y.a < 0 || y.b < 0) continue;
            if (!best || std::tie(y.b, y.a) < std::tie(best->b, best->a)) best = y;
        }
    }
    if (!best) throw std::logic_error("canon_imaginary: empty orbit");
    return *best;
}

// Bring mu (positive, norm +N) into sqrt(N) <= mu < eps*sqrt(N), allowing a
// final conjugate flip.  All comparisons are exact.
QuadInt normalize_real(QuadInt mu, const Natural& N, const FieldInvariants& inv) {
    if (mu.sign_real() < 0) mu = -mu;
    const QuadInt eps2 =
        (inv.eps_norm == -1) ? inv.eps * inv.eps : inv.eps;  // smallest totally positive unit power
    const QuadInt nqi(2 * N, 0, mu.D);
    auto cmp_sq = [&](const QuadInt& z, const QuadInt& bound) {
        return cmp_real(z * z, bound);
    };
    int guard = 0;
    while (cmp_sq(mu, nqi) < 0) {  // mu < sqrt(N)
        mu = mu * eps2;
        if (++guard > 100000) throw std::logic_error("normalize_real diverged");
    }
    QuadInt eps2N = eps2 * eps2 * nqi;  // (eps2 * sqrt(N))^2
    while (cmp_sq(mu, eps2N) >= 0) {
        auto d = divide_exact(mu, eps2);
        if (!d) throw std::logic_error("normalize_real: unit division failed");
        mu = *d;
        if (++guard > 100000) throw std::logic_error("normalize_real diverged");
    }
    if (inv.eps_norm == -1) {
        // the positive-unit step is eps^2; fold [eps*sqrt(N), eps^2*sqrt(N))
        // onto the conjugate half so that mu < eps*sqrt(N)
        QuadInt eps_sqN = inv.eps * inv.eps * nqi;  // (eps*sqrt(N))^2 = eps^2 N
        if (cmp_sq(mu, eps_sqN) >= 0) mu = mu.conj() * eps2;
    }
    if (mu.sign_real() <= 0 || mu.conj().sign_real() <= 0 || cmp_real(mu.conj(), mu) > 0)
        throw std::logic_error("normalize_real: not in the fundamental domain");
    return mu;
}

double log_mpz_approx(const Natural& n) {
    if (n <= 0) return -1e300;
    long exp2;
    double d = mpz_get_d_2exp(&exp2, n.get_mpz_t());
    return std::log(d) + static_cast<double>(exp2) * std::log(2.0);
}

}  // namespace

std::vector<QuadInt> norm_equation(const FieldDescriptor& fd, const Natural& N, NormMode mode,
                                   const FieldInvariants* inv_in) {
    if (N < 1) throw std::invalid_argument("norm_equation: N must be >= 1");
    std::vector<QuadInt> out;
    std::set<std::pair<Natural, Natural>> seen;
    auto push = [&](const QuadInt& z) {
        if (mode == NormMode::AllPrimitive && !is_primitive_qi(z)) return;
        if (seen.insert({z.a, z.b}).second) out.push_back(z);
    };

    if (fd.D < 0) {
        FieldInvariants local;
        const FieldInvariants* inv = inv_in;
        if (!inv) {
            local = field_invariants(fd.q());
            inv = &local;
        }
        const Natural absD(-fd.D);
        Natural four_n = 4 * N;
        Natural bmax = isqrt(four_n / absD);
        if (bmax > 100'000'000)
            throw std::length_error("norm_equation: scan range exceeds the resource cap");
        for (Natural b = 0; b <= bmax; ++b) {
            Natural t = four_n - absD * b * b;
            if (t < 0) break;
            if (!is_perfect_square(t)) continue;
            Natural a = isqrt(t);
            if (mpz_odd_p(Natural(a - b).get_mpz_t())) continue;
            push(canon_imaginary(QuadInt(a, b, fd.D), *inv));
        }
    } else {
        FieldInvariants local;
        const FieldInvariants* inv = inv_in;
        if (!inv) {
            local = field_invariants(fd.q());
            inv = &local;
        }
        const double bmax_d =
            std::exp(inv->regulator + 0.5 * (log_mpz_approx(N) - std::log(double(fd.D)))) + 2.0;
        if (!(bmax_d < 1e8))
            throw std::length_error("norm_equation: fundamental unit too large for direct scan");
        const Natural D(fd.D);
        Natural bmax(static_cast<unsigned long>(bmax_d));
        for (Natural b = 0; b <= bmax; ++b) {
            for (int sign : {+1, -1}) {
                Natural t = sign > 0 ? Natural(4 * N + D * b * b) : Natural(D * b * b - 4 * N);
                if (t < 0) continue;
                if (!is_perfect_square(t)) continue;
                Natural a = isqrt(t);
                if (mpz_odd_p(Natural(a - b).get_mpz_t())) continue;
                QuadInt z(a, b, fd.D);
                if (sign < 0) {
                    // norm -N; rotate into +N with the fundamental unit
                    if (inv->eps_norm != -1) continue;  // cannot fix the sign
                    z = z * inv->eps;
                }
                push(normalize_real(z, N, *inv));
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const QuadInt& x, const QuadInt& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    if (mode == NormMode::One && out.size() > 1) out.resize(1);
    return out;
}

bool coprimality_condition(const Natural& X, const Natural& Y, const FieldDescriptor& fd) {
    // A common prime ideal of (X+Y sqrt(D))/2 and its conjugate divides the sum
    // X and the difference Y sqrt(D); away from the ramified prime q it divides
    // gcd(X, Y).  Conversely an odd rational prime p != q dividing gcd(X, Y)
    // divides both conjugates outright.  The prime 2 needs care: gcd(X, Y)
    // even only violates the condition when (X + Y sqrt(D))/2 itself is
    // divisible by 2, i.e. X/2 ≡ Y/2 (mod 2); otherwise its norm is odd.
    Natural g;
    mpz_gcd(g.get_mpz_t(), X.get_mpz_t(), Y.get_mpz_t());
    if (g == 0) return false;
    const unsigned long q = fd.q();
    while (mpz_divisible_ui_p(g.get_mpz_t(), q)) g /= static_cast<unsigned long>(q);
    if (g == 1) return true;
    Natural odd = g;
    while (mpz_even_p(odd.get_mpz_t())) odd /= 2;
    if (odd > 1) return false;
    Natural hx = X / 2, hy = Y / 2;  // g is a power of 2, so X and Y are even
    return mpz_odd_p(Natural(hx - hy).get_mpz_t());
}

DecompositionWitness decompose_solution(const Natural& X, const Natural& Y,
                                        const FieldDescriptor& fd, const Natural& A,
                                        const std::vector<Natural>& m_list,
                                        const std::vector<unsigned>& e_list,
                                        const FieldInvariants& inv) {
    if (m_list.size() != e_list.size())
        throw std::invalid_argument("decompose_solution: m/e length mismatch");
    Natural rhs = A;
    for (size_t i = 0; i < m_list.size(); ++i) {
        Natural pk;
        mpz_pow_ui(pk.get_mpz_t(), m_list[i].get_mpz_t(), e_list[i]);
        rhs *= pk;
    }
    if (X * X - Natural(fd.D) * Y * Y != 4 * rhs)
        throw std::invalid_argument("decompose_solution: (X,Y) does not solve the norm form");
    if (!coprimality_condition(X, Y, fd))
        throw std::invalid_argument("decompose_solution: coprimality condition fails");

    const unsigned h = inv.h;
    const size_t s = m_list.size();
    DecompositionWitness w;
    w.u.resize(s);
    w.v.resize(s);
    Natural a_prime = A;
    for (size_t i = 0; i < s; ++i) {
        w.v[i] = e_list[i] % h;
        w.u[i] = e_list[i] / h;
        Natural pk;
        mpz_pow_ui(pk.get_mpz_t(), m_list[i].get_mpz_t(), w.v[i]);
        a_prime *= pk;
    }

    std::vector<std::vector<QuadInt>> mu_cands(s);
    for (size_t i = 0; i < s; ++i) {
        Natural mh;
        mpz_pow_ui(mh.get_mpz_t(), m_list[i].get_mpz_t(), h);
        auto cands = norm_equation(fd, mh, NormMode::AllPrimitive, &inv);
        for (const auto& c : cands) {
            mu_cands[i].push_back(c);
            if (c.b != 0) mu_cands[i].push_back(c.conj());
        }
        if (mu_cands[i].empty())
            throw std::runtime_error("decompose_solution: no generator of norm m^h "
                                     "(internal error: m^h must be principal)");
    }
    std::vector<QuadInt> alpha_cands;
    for (const auto& c : norm_equation(fd, a_prime, NormMode::All, &inv)) {
        alpha_cands.push_back(c);
        if (c.b != 0) alpha_cands.push_back(c.conj());
    }
    if (alpha_cands.empty())
        throw std::runtime_error("decompose_solution: no element of norm A' "
                                 "(internal error: the class is principal)");

    QuadInt beta(X, Y, fd.D);
    if (fd.real() && beta.sign_real() < 0) beta = -beta;  // handle signs by symmetry

    const auto torsion = inv.torsion_units();
    std::vector<size_t> idx(s, 0);
    std::uint64_t combos = 1;
    for (const auto& v : mu_cands) combos *= v.size();
    if (combos > 1'000'000) throw std::length_error("decompose_solution: combination blow-up");

    for (const auto& alpha : alpha_cands) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            QuadInt gamma = alpha;
            for (size_t i = 0; i < s; ++i) gamma = gamma * mu_cands[i][idx[i]].pow(w.u[i]);
            if (auto delta = divide_exact(beta, gamma)) {
                Natural nd = delta->norm();
                if (nd == 1 || nd == -1) {
                    if (!fd.real()) {
                        for (size_t t = 0; t < torsion.size(); ++t) {
                            if (*delta == torsion[t]) {
                                w.alpha_prime = alpha;
                                for (size_t i = 0; i < s; ++i) w.mu.push_back(mu_cands[i][idx[i]]);
                                w.unit_exponent = static_cast<long>(t);
                                return w;
                            }
                        }
                    } else if (delta->sign_real() > 0) {
                        long k = std::lround(log_qi(*delta) / inv.regulator);
                        for (long kk = k - 1; kk <= k + 1; ++kk) {
                            QuadInt cand = kk >= 0 ? inv.eps.pow(static_cast<unsigned long>(kk))
                                                   : [&] {
                                                         QuadInt einv = inv.eps_norm == -1
                                                                            ? -inv.eps.conj()
                                                                            : inv.eps.conj();
                                                         return einv.pow(static_cast<unsigned long>(-kk));
                                                     }();
                            if (cand == *delta) {
                                w.alpha_prime = alpha;
                                for (size_t i = 0; i < s; ++i) w.mu.push_back(mu_cands[i][idx[i]]);
                                w.unit_exponent = kk;
                                return w;
                            }
                        }
                    }
                }
            }
            // odometer over candidate generators
            size_t pos = 0;
            while (pos < s && ++idx[pos] == mu_cands[pos].size()) idx[pos++] = 0;
            if (pos == s) break;
        }
    }
    throw std::runtime_error("decompose_solution: witness reconciliation failed");
}

}  // namespace repq
