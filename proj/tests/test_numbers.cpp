#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gmpxx.h>

#include "repq/numbers.hpp"

using namespace repq;

namespace {

// schoolbook oracle: 1 + x + ... + x^(q-1)
Natural repunit_oracle(const Natural& x, unsigned q) {
    Natural acc = 0, pw = 1;
    for (unsigned i = 0; i < q; ++i) {
        acc += pw;
        pw *= x;
    }
    return acc;
}

}  // namespace

TEST_CASE("repunit_quotient matches the schoolbook sum") {
    CHECK(repunit_quotient(2, 3) == 7);
    CHECK(repunit_quotient(18, 3) == 343);   // 18^2 + 18 + 1
    CHECK(repunit_quotient(3, 5) == 121);    // 81 + 27 + 9 + 3 + 1
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(12345);
    for (unsigned q : {3u, 5u, 7u, 11u}) {
        for (int i = 0; i < 50; ++i) {
            Natural x = rng.get_z_range(1000000) + 2;
            Natural v = repunit_quotient(x, q);
            CHECK(v == repunit_oracle(x, q));
            // defining identity
            Natural pw;
            mpz_pow_ui(pw.get_mpz_t(), x.get_mpz_t(), q);
            CHECK(v * (x - 1) + 1 == pw);
        }
    }
}

TEST_CASE("repunit_quotient rejects bad input") {
    CHECK_THROWS_AS(repunit_quotient(1, 3), std::invalid_argument);
    CHECK_THROWS_AS(repunit_quotient(2, 4), std::invalid_argument);
    CHECK_THROWS_AS(repunit_quotient(2, 9), std::invalid_argument);
    CHECK_THROWS_AS(repunit_quotient(2, 2), std::invalid_argument);
}

TEST_CASE("is_prime basics") {
    CHECK(is_prime(7));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(0));
    CHECK_FALSE(is_prime(343));  // 7^3
    CHECK(is_prime(2));
    // 2^89-1 is a Mersenne prime
    Natural m89 = (Natural(1) << 89) - 1;
    CHECK(is_prime(m89));
    CHECK_FALSE(is_prime(m89 * 3));
}

TEST_CASE("is_prime agrees with a sieve below 10^5") {
    auto primes = primes_up_to(100000);
    size_t idx = 0;
    for (unsigned n = 0; n <= 100000; ++n) {
        bool in_sieve = idx < primes.size() && primes[idx] == n;
        if (in_sieve) ++idx;
        CHECK(is_prime(Natural(n)) == in_sieve);
    }
}

TEST_CASE("smooth_factor spec cases") {
    {
        auto f = smooth_factor(343, {Natural(7)}, 1000);
        REQUIRE(f.factors.size() == 1);
        CHECK(f.factors[0].prime == 7);
        CHECK(f.factors[0].exponent == 3);
        CHECK(f.cofactor == 1);
    }
    {
        auto f = smooth_factor(121, {Natural(11)}, 1000);
        REQUIRE(f.factors.size() == 1);
        CHECK(f.factors[0].prime == 11);
        CHECK(f.factors[0].exponent == 2);
        CHECK(f.cofactor == 1);
    }
    {
        // 21 = 3 * 7, 3 not allowed and trial_limit excludes it
        auto f = smooth_factor(21, {Natural(7)}, 1);
        REQUIRE(f.factors.size() == 1);
        CHECK(f.factors[0].prime == 7);
        CHECK(f.factors[0].exponent == 1);
        CHECK(f.cofactor == 3);
    }
    CHECK_THROWS_AS(smooth_factor(10, {Natural(6)}, 10), std::invalid_argument);
}

TEST_CASE("factorization round-trip on random inputs") {
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(987654321);
    std::vector<Natural> allowed = {2, 3, 5, 7, 11, 13};
    for (int i = 0; i < 10000; ++i) {
        Natural n = rng.get_z_bits(60) + 1;
        auto f = smooth_factor(n, allowed, 1000);
        CHECK(f.verify(n));
        for (size_t k = 0; k + 1 < f.factors.size(); ++k)
            CHECK(f.factors[k].prime < f.factors[k + 1].prime);
        for (const auto& fe : f.factors) CHECK(is_prime(fe.prime));
    }
}

TEST_CASE("largest_prime_factor") {
    auto r = largest_prime_factor(7);
    CHECK(r.prime == 7);
    CHECK(r.complete);
    r = largest_prime_factor(343);
    CHECK(r.prime == 7);
    CHECK(r.complete);
    r = largest_prime_factor(repunit_quotient(4, 3));  // 21 = 3 * 7
    CHECK(r.prime == 7);
    CHECK(r.complete);
    // a 32-digit semiprime still factors quickly with rho
    Natural a("1000000000000037"), b("1000000000000091");
    r = largest_prime_factor(a * b);
    CHECK(r.complete);
    CHECK(r.prime == b);
    // budget exhaustion degrades to a lower bound, not a stall
    FactorBudget tiny{100, 10};
    auto partial = largest_prime_factor(a * b * 7, tiny);
    CHECK(partial.prime >= 7);
    CHECK_FALSE(partial.complete);
    CHECK(partial.unfactored == a * b);
}

TEST_CASE("primes_in_ap spec cases") {
    CHECK(primes_in_ap(50, 3, 1) == std::vector<std::uint64_t>{7, 13, 19, 31, 37, 43});
    CHECK(primes_in_ap(10, 5, 1).empty());
    CHECK(primes_in_ap(50, 1, 0) ==
          std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47});
    CHECK_THROWS_AS(primes_in_ap(100, 6, 3), std::invalid_argument);
    CHECK_THROWS_AS(primes_in_ap(1ull << 40, 3, 1), std::length_error);
}

TEST_CASE("primes_in_ap agrees with filtering is_prime") {
    for (unsigned q : {3u, 5u, 7u}) {
        auto got = primes_in_ap(100000, q, 1);
        std::vector<std::uint64_t> want;
        for (std::uint64_t n = 2; n <= 100000; ++n)
            if (n % q == 1 && is_prime(Natural(n))) want.push_back(n);
        CHECK(got == want);
    }
}

TEST_CASE("jacobi spec cases and Euler criterion") {
    CHECK(jacobi(2, 7) == 1);    // squares mod 7: {1,2,4}
    CHECK(jacobi(3, 5) == -1);   // squares mod 5: {1,4}
    CHECK(jacobi(7, 7) == 0);
    CHECK_THROWS_AS(jacobi(3, 8), std::invalid_argument);
    for (std::uint64_t p : primes_up_to(1000)) {
        if (p == 2) continue;
        for (std::uint64_t a = 0; a < p; ++a) {
            Natural e((p - 1) / 2), r, np(p), na(a);
            mpz_powm(r.get_mpz_t(), na.get_mpz_t(), e.get_mpz_t(), np.get_mpz_t());
            int euler = (r == 0) ? 0 : (r == 1 ? 1 : -1);
            CHECK(jacobi(na, np) == euler);
        }
    }
}
