#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include <gmpxx.h>
#include <mpfr.h>

#include "repq/quadfield.hpp"

using namespace repq;

namespace {

// Independent class-number oracle: brute scan of all (a,b,c) boxes for the
// reduced conditions, written without reusing the library's enumerator.
unsigned h_oracle_imaginary(long q) {
    const long D = -q;
    unsigned n = 0;
    for (long a = 1; a * a <= q; ++a)
        for (long b = -a; b <= a; ++b)
            for (long c = a; 4 * a * c <= b * b + q; ++c) {
                if (b * b - 4 * a * c != D) continue;
                if (b < 0 && (-b == a || a == c)) continue;
                ++n;
            }
    return n;
}

// Second, genuinely different route: the finite character-sum class number
// formula.  Imaginary prime discriminant -q (q ≡ 3 mod 4, q > 3):
// h = (sum over 0<a<q/2 of (a|q)) / (2 - (2|q)).
unsigned h_analytic_imaginary(long q) {
    if (q == 3) return 1;
    long s = 0;
    for (long a = 1; 2 * a < q; ++a) s += jacobi(Natural(a), Natural(q));
    long denom = 2 - jacobi(Natural(2), Natural(q));
    REQUIRE(s % denom == 0);
    return static_cast<unsigned>(s / denom);
}

// Real prime discriminant q ≡ 1 mod 4: h = sqrt(q) L(1,chi) / (2 log eps)
// evaluated with the exact finite sum L(1,chi) = -sum chi(a) log sin(pi a/q)/sqrt(q).
unsigned h_analytic_real(long q, double log_eps) {
    mpfr_t acc, t, pi;
    mpfr_inits2(256, acc, t, pi, static_cast<mpfr_ptr>(nullptr));
    mpfr_const_pi(pi, MPFR_RNDN);
    mpfr_set_ui(acc, 0, MPFR_RNDN);
    for (long a = 1; a < q; ++a) {
        int chi = jacobi(Natural(a), Natural(q));
        if (chi == 0) continue;
        mpfr_mul_si(t, pi, a, MPFR_RNDN);
        mpfr_div_si(t, t, q, MPFR_RNDN);
        mpfr_sin(t, t, MPFR_RNDN);
        mpfr_log(t, t, MPFR_RNDN);
        if (chi > 0) mpfr_sub(acc, acc, t, MPFR_RNDN);
        else mpfr_add(acc, acc, t, MPFR_RNDN);
    }
    double val = mpfr_get_d(acc, MPFR_RNDN) / (2.0 * log_eps);
    mpfr_clears(acc, t, pi, static_cast<mpfr_ptr>(nullptr));
    long h = std::lround(val);
    REQUIRE(std::fabs(val - double(h)) < 1e-6);
    return static_cast<unsigned>(h);
}

}  // namespace

TEST_CASE("field_descriptor sign and validation") {
    CHECK(field_descriptor(5).D == 5);
    CHECK(field_descriptor(3).D == -3);
    CHECK(field_descriptor(7).D == -7);
    CHECK(field_descriptor(13).D == 13);
    CHECK_THROWS_AS(field_descriptor(4), std::invalid_argument);
    CHECK_THROWS_AS(field_descriptor(9), std::invalid_argument);
}

TEST_CASE("QuadInt arithmetic keeps parity and multiplicative norms") {
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(42);
    for (long D : {-3L, -7L, 5L, 13L}) {
        for (int i = 0; i < 2500; ++i) {
            Natural a1 = rng.get_z_range(2000) - 1000, b1 = rng.get_z_range(2000) - 1000;
            Natural a2 = rng.get_z_range(2000) - 1000, b2 = rng.get_z_range(2000) - 1000;
            if (mpz_odd_p(Natural(a1 - b1).get_mpz_t())) a1 += 1;
            if (mpz_odd_p(Natural(a2 - b2).get_mpz_t())) a2 += 1;
            QuadInt x(a1, b1, D), y(a2, b2, D);
            QuadInt z = x * y;
            CHECK(z.norm() == x.norm() * y.norm());
            CHECK(mpz_even_p(Natural(z.a - z.b).get_mpz_t()));
        }
    }
}

TEST_CASE("spot field invariants") {
    auto i5 = field_invariants(5);
    CHECK(i5.fd.D == 5);
    CHECK(i5.h == 1);
    CHECK(i5.eps == QuadInt(1, 1, 5));  // (1+sqrt5)/2
    CHECK(i5.eps_norm == -1);
    CHECK(i5.regulator == doctest::Approx(0.4812118250596).epsilon(1e-12));
    CHECK(i5.torsion_order == 2);

    auto i3 = field_invariants(3);
    CHECK(i3.fd.D == -3);
    CHECK(i3.h == 1);
    CHECK(i3.torsion_order == 6);
    CHECK(i3.regulator == 0.0);

    auto i23 = field_invariants(23);
    CHECK(i23.fd.D == -23);
    CHECK(i23.h == 3);

    auto i47 = field_invariants(47);
    CHECK(i47.h == 5);

    auto i13 = field_invariants(13);
    CHECK(i13.h == 1);
    CHECK(i13.eps == QuadInt(3, 1, 13));

    auto i229 = field_invariants(229);  // first real quadratic prime field with h = 3
    CHECK(i229.h == 3);
    CHECK(i229.eps == QuadInt(15, 1, 229));
}

TEST_CASE("class numbers match two independent oracles for q < 300") {
    for (std::uint64_t q : primes_up_to(300)) {
        if (q == 2) continue;
        auto inv = field_invariants(q);
        if (inv.fd.D < 0) {
            CHECK(inv.h == h_oracle_imaginary(static_cast<long>(q)));
            CHECK(inv.h == h_analytic_imaginary(static_cast<long>(q)));
        } else {
            CHECK(inv.h == h_analytic_real(static_cast<long>(q), inv.regulator));
        }
    }
}

TEST_CASE("h and R satisfy the sqrt(q) log 4q sanity bound for q < 500") {
    for (std::uint64_t q : primes_up_to(500)) {
        if (q == 2) continue;
        auto inv = field_invariants(q);  // throws if the bound fails
        const double cap = std::sqrt(double(q)) * std::log(4.0 * double(q));
        CHECK(inv.h <= cap);
        CHECK(inv.regulator <= cap);
    }
}

TEST_CASE("fundamental unit: |norm| = 1 and no smaller unit among convergents") {
    for (std::uint64_t q : {5ull, 13ull, 17ull, 29ull, 41ull, 61ull, 73ull, 97ull, 229ull}) {
        auto inv = field_invariants(q);
        Natural n = inv.eps.norm();
        CHECK((n == 1 || n == -1));
        CHECK(inv.eps.sign_real() > 0);
        CHECK(cmp_real(inv.eps, qi_one(inv.fd.D)) > 0);  // eps > 1
        // convergent candidates of sqrt(q): any unit > 1 strictly below eps
        // would show up as (p, r) with |p^2 - q r^2| in {1, 4}
        Natural s = isqrt(Natural(q));
        Natural p_prev = 1, p_cur = s, r_prev = 0, r_cur = 1;
        Natural P = 0, Q = 1, a = s;
        for (int it = 0; it < 200; ++it) {
            for (const Natural& num : {Natural(2 * p_cur), Natural(p_cur)}) {
                const Natural& den = (num == p_cur) ? r_cur : r_cur;
                (void)den;
            }
            // candidate units (2p + 2r sqrt(q))/2 and, when parity works, (p + r sqrt(q))/2
            QuadInt cand1(2 * p_cur, 2 * r_cur, inv.fd.D);
            Natural n1 = cand1.norm();
            if ((n1 == 1 || n1 == -1) && cmp_real(cand1, qi_one(inv.fd.D)) > 0)
                CHECK(cmp_real(inv.eps, cand1) <= 0);
            if (mpz_even_p(Natural(p_cur - r_cur).get_mpz_t())) {
                QuadInt cand2(p_cur, r_cur, inv.fd.D);
                Natural n2 = cand2.norm();
                if ((n2 == 1 || n2 == -1) && cmp_real(cand2, qi_one(inv.fd.D)) > 0)
                    CHECK(cmp_real(inv.eps, cand2) <= 0);
            }
            Natural P2 = a * Q - P;
            Natural Q2 = (Natural(q) - P2 * P2) / Q;
            Natural a2 = (s + P2) / Q2;
            P = P2; Q = Q2; a = a2;
            Natural pn = a * p_cur + p_prev, rn = a * r_cur + r_prev;
            p_prev = p_cur; p_cur = pn;
            r_prev = r_cur; r_cur = rn;
            if (cmp_real(QuadInt(2 * p_prev, 2 * r_prev, inv.fd.D), inv.eps) > 0) break;
        }
    }
}

TEST_CASE("split_prime spec cases") {
    auto r = split_prime(11, field_descriptor(5));
    CHECK(r.b == 7);  // 49 ≡ 5 (mod 44)
    r = split_prime(7, field_descriptor(3));
    CHECK(r.b == 5);  // 25 ≡ -3 (mod 28)
    CHECK_THROWS_AS(split_prime(13, field_descriptor(5)), std::invalid_argument);  // inert
    CHECK_THROWS_AS(split_prime(5, field_descriptor(5)), std::invalid_argument);   // ramified
    // exhaustive scan oracle on a few split primes
    for (unsigned long q : {5ul, 13ul, 3ul, 7ul, 23ul}) {
        auto fd = field_descriptor(q);
        for (std::uint64_t p : primes_up_to(200)) {
            if (p == 2 || p == q) continue;
            Natural Dmod = Natural(fd.D) % p;
            if (Dmod < 0) Dmod += p;
            if (jacobi(Dmod, Natural(p)) != 1) continue;
            auto rep = split_prime(Natural(p), fd);
            Natural smallest = 0;
            for (Natural b = 1; b < 2 * p; ++b)
                if ((b * b - fd.D) % (4 * Natural(p)) == 0) { smallest = b; break; }
            CHECK(rep.b == smallest);
            CHECK(rep.b > 0);
            CHECK(rep.b < 2 * p);
        }
    }
}

TEST_CASE("norm_equation spec cases") {
    {
        auto sols = norm_equation(FieldDescriptor{-7}, 8);
        REQUIRE(sols.size() == 1);  // (2,2) = 2*(1,1) is imprimitive and excluded
        CHECK(sols[0] == QuadInt(5, 1, -7));
        CHECK(sols[0].norm() == 8);
    }
    {
        auto sols = norm_equation(FieldDescriptor{-3}, 1);
        REQUIRE(sols.size() == 1);
        CHECK(sols[0] == QuadInt(2, 0, -3));
    }
    {
        auto sols = norm_equation(FieldDescriptor{5}, 11);
        REQUIRE(sols.size() == 1);
        CHECK(sols[0] == QuadInt(7, 1, 5));
        CHECK(sols[0].norm() == 11);
    }
    {
        // no representation is a valid outcome, not an error
        auto sols = norm_equation(FieldDescriptor{-3}, 5);
        CHECK(sols.empty());
    }
}

TEST_CASE("norm_equation exhaustive against a naive double loop (imaginary)") {
    for (long q : {3L, 7L, 11L, 23L, 43L}) {
        FieldDescriptor fd{-q};
        auto inv = field_invariants(q);
        for (unsigned N = 1; N <= 2000; ++N) {
            auto sols = norm_equation(fd, N, NormMode::All, &inv);
            // naive: all (a,b) with a,b >= 0, a^2 + q b^2 = 4N, a ≡ b (mod 2),
            // collapsed to canonical representatives
            std::set<std::pair<Natural, Natural>> naive;
            for (long b = 0; q * b * b <= 4L * N; ++b) {
                long t = 4L * N - q * b * b;
                long a = std::lround(std::sqrt(double(t)));
                while (a * a > t) --a;
                while ((a + 1) * (a + 1) <= t) ++a;
                if (a * a != t) continue;
                if ((a - b) % 2 != 0) continue;
                // canonicalize through the library's own orbit map by searching
                // the returned list for an orbit member
                bool found = false;
                for (const auto& s : sols) {
                    for (const auto& u : inv.torsion_units()) {
                        for (const QuadInt& y : {u * s, u * s.conj()}) {
                            if (y.a == a && y.b == b) found = true;
                        }
                    }
                }
                if (found) naive.insert({Natural(a), Natural(b)});
                else naive.insert({Natural(-1), Natural(b)});  // marks a miss
            }
            for (const auto& [a, b] : naive) CHECK(a != -1);
            // soundness: every returned element really has norm N
            for (const auto& s : sols) {
                CHECK(s.norm() == N);
                CHECK(s.a >= 0);
                CHECK(s.b >= 0);
            }
        }
    }
}

TEST_CASE("norm_equation exhaustive against a naive scan (real)") {
    for (unsigned long q : {5ul, 13ul, 29ul}) {
        FieldDescriptor fd{static_cast<long>(q)};
        auto inv = field_invariants(q);
        for (unsigned N = 1; N <= 500; ++N) {
            auto sols = norm_equation(fd, N, NormMode::All, &inv);
            for (const auto& s : sols) {
                CHECK(s.norm() == N);
                CHECK(s.sign_real() > 0);
                CHECK(s.conj().sign_real() > 0);
                CHECK(cmp_real(s.conj(), s) <= 0);  // 0 < conj(mu) <= mu
            }
            // completeness probe: any naive solution must land in some orbit
            for (long b = 0; b * b * long(q) <= 4L * N * 4; ++b) {
                long t = 4L * N + long(q) * b * b;
                long a = std::lround(std::sqrt(double(t)));
                while (a * a > t) --a;
                while ((a + 1) * (a + 1) <= t) ++a;
                if (a * a != t || (a - b) % 2 != 0) continue;
                QuadInt cand(a, b, fd.D);
                bool matched = false;
                for (const auto& s : sols) {
                    QuadInt probe = cand;
                    // normalize candidate into the domain by unit steps
                    for (int step = 0; step < 64 && !matched; ++step) {
                        if (probe == s || probe.conj() == s || (-probe) == s) matched = true;
                        auto d = divide_exact(probe, inv.eps);
                        if (!d) break;
                        probe = *d;
                    }
                    QuadInt probe2 = cand;
                    for (int step = 0; step < 64 && !matched; ++step) {
                        if (probe2 == s || probe2.conj() == s || (-probe2) == s) matched = true;
                        probe2 = probe2 * inv.eps;
                    }
                }
                CHECK(matched);
            }
        }
    }
}

TEST_CASE("coprimality condition") {
    CHECK(coprimality_condition(5, 1, FieldDescriptor{-7}));
    CHECK(coprimality_condition(14, 7, FieldDescriptor{-7}));  // gcd 7 = |D|
    CHECK_FALSE(coprimality_condition(6, 2, FieldDescriptor{5}));   // (3+sqrt5) is even
    CHECK(coprimality_condition(2, 0, FieldDescriptor{5}));         // the element 1
    CHECK_FALSE(coprimality_condition(4, 0, FieldDescriptor{5}));   // the element 2
    CHECK_FALSE(coprimality_condition(15, 3, FieldDescriptor{-7})); // gcd 3, 3 != q
}

TEST_CASE("decompose_solution spec instances") {
    {
        // q=3, x=2: 4*7 = 5^2 + 3*1^2
        auto inv = field_invariants(3);
        auto w = decompose_solution(5, 1, inv.fd, 1, {Natural(7)}, {1}, inv);
        REQUIRE(w.mu.size() == 1);
        CHECK(w.mu[0].norm() == 7);
        CHECK(w.v[0] == 0);
        CHECK(w.u[0] == 1);
        // verify the product exactly: alpha' * omega^{u0} * mu^{u1}
        QuadInt prod = w.alpha_prime * inv.torsion_units()[w.unit_exponent] * w.mu[0].pow(w.u[0]);
        CHECK(prod == QuadInt(5, 1, -3));
    }
    {
        // q=5, x=3: 4*121 = 23^2 - 5*3^2, m=11, e=2
        auto inv = field_invariants(5);
        auto w = decompose_solution(23, 3, inv.fd, 1, {Natural(11)}, {2}, inv);
        REQUIRE(w.mu.size() == 1);
        CHECK(w.mu[0].norm() == 11);
        CHECK(w.u[0] == 2);
        QuadInt unit = qi_one(5);
        long k = w.unit_exponent;
        QuadInt epow = k >= 0 ? inv.eps.pow(k) : (-inv.eps.conj()).pow(-k);
        QuadInt prod = w.alpha_prime * epow * w.mu[0].pow(2);
        CHECK(prod == QuadInt(23, 3, 5));
        (void)unit;
    }
    {
        // trivial instance: A=1, s=0, X=2, Y=0 (value 1)
        auto inv = field_invariants(5);
        auto w = decompose_solution(2, 0, inv.fd, 1, {}, {}, inv);
        CHECK(w.u.empty());
        CHECK(w.unit_exponent == 0);
        CHECK(w.alpha_prime == qi_one(5));
    }
}

TEST_CASE("decompose_solution witnesses multiply back on random instances") {
    // build instances from known products: pick mu of norm m, exponents, unit power
    for (unsigned long q : {3ul, 5ul, 7ul, 13ul}) {
        auto inv = field_invariants(q);
        auto fd = inv.fd;
        std::vector<Natural> msel;
        for (std::uint64_t p : primes_in_ap(200, q, 1)) {
            auto sols = norm_equation(fd, Natural(p), NormMode::AllPrimitive, &inv);
            if (!sols.empty()) msel.push_back(Natural(p));
            if (msel.size() == 2) break;
        }
        if (msel.empty()) continue;
        for (unsigned e1 = 1; e1 <= 3; ++e1) {
            auto mu = norm_equation(fd, msel[0], NormMode::AllPrimitive, &inv).at(0);
            QuadInt prod = mu.pow(e1);
            if (fd.real() && e1 % 2 == 0) prod = prod * inv.eps;  // stir in a unit
            Natural X = prod.a, Y = prod.b;
            Natural val = prod.norm();
            if (val < 0) continue;
            if (!coprimality_condition(X, Y, fd)) continue;
            auto w = decompose_solution(X, Y, fd, 1, {msel[0]}, {e1}, inv);
            // exact reconstruction
            QuadInt acc = w.alpha_prime;
            if (fd.real()) {
                long k = w.unit_exponent;
                QuadInt epow = k >= 0 ? inv.eps.pow(k)
                                      : (inv.eps_norm == -1 ? (-inv.eps.conj()).pow(-k)
                                                            : inv.eps.conj().pow(-k));
                acc = acc * epow;
            } else {
                acc = acc * inv.torsion_units()[w.unit_exponent];
            }
            for (size_t i = 0; i < w.mu.size(); ++i) acc = acc * w.mu[i].pow(w.u[i]);
            QuadInt target(X, Y, fd.D);
            if (fd.real() && target.sign_real() < 0) target = -target;
            CHECK(acc == target);
        }
    }
}
