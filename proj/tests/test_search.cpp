#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "repq/search.hpp"

using namespace repq;

namespace {

SearchConfig cfg(unsigned long q, unsigned long A, std::vector<unsigned long> ms,
                 unsigned long x_max, bool prime_only = false, unsigned workers = 1) {
    SearchConfig c;
    c.q = q;
    c.A = A;
    for (auto m : ms) c.m_list.emplace_back(m);
    c.x_max = x_max;
    c.prime_only = prime_only;
    c.workers = workers;
    return c;
}

}  // namespace

TEST_CASE("ground truth: q=3, A=1, m={7} has exactly x=2 and x=18 below 10^6") {
    auto res = enumerate_solutions(cfg(3, 1, {7}, 1000000));
    REQUIRE(res.records.size() == 2);
    CHECK(res.records[0].x == 2);
    CHECK(res.records[0].exponents == std::vector<unsigned>{1});
    CHECK(res.records[0].value == 7);
    CHECK(res.records[1].x == 18);
    CHECK(res.records[1].exponents == std::vector<unsigned>{3});
    CHECK(res.records[1].value == 343);
    CHECK(res.undecided.empty());
    for (const auto& r : res.records) {
        CHECK(r.bound_check.all_below);
        CHECK(r.class_index == 1);
        CHECK(r.factorization.verify(r.value));
        CHECK(r.factorization.cofactor == 1);
    }
}

TEST_CASE("ground truth: q=5, m={11}, primes only: exactly p=3 with e=2") {
    auto res = enumerate_solutions(cfg(5, 1, {11}, 1000000, true));
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].x == 3);
    CHECK(res.records[0].exponents == std::vector<unsigned>{2});
    CHECK(res.records[0].value == 121);
    // the same record appears when the range is cut at 10
    auto res10 = enumerate_solutions(cfg(5, 1, {11}, 10, true));
    REQUIRE(res10.records.size() == 1);
    CHECK(res10.records[0].x == 3);
}

TEST_CASE("A > 1: q=3, A=3, m={7} includes x=4 (21 = 3*7)") {
    auto res = enumerate_solutions(cfg(3, 3, {7}, 1000));
    bool found4 = false;
    for (const auto& r : res.records) {
        if (r.x == 4) {
            found4 = true;
            CHECK(r.exponents == std::vector<unsigned>{1});
            CHECK(r.value == 21);
        }
        // soundness: the defining equation holds exactly
        Natural prod = Natural(3);
        for (size_t i = 0; i < r.exponents.size(); ++i) {
            Natural pk;
            mpz_pow_ui(pk.get_mpz_t(), Natural(7).get_mpz_t(), r.exponents[i]);
            prod *= pk;
        }
        CHECK(prod == r.value);
    }
    CHECK(found4);
}

TEST_CASE("soundness: emitted records re-multiply exactly (random configs)") {
    for (auto& c : {cfg(3, 1, {7, 13}, 20000), cfg(7, 1, {29}, 20000),
                    cfg(5, 1, {11, 31}, 20000), cfg(3, 1, {7, 13, 19}, 20000)}) {
        auto res = enumerate_solutions(c);
        for (const auto& r : res.records) {
            Natural prod = c.A;
            for (size_t i = 0; i < c.m_list.size(); ++i) {
                Natural pk;
                mpz_pow_ui(pk.get_mpz_t(), c.m_list[i].get_mpz_t(), r.exponents[i]);
                prod *= pk;
            }
            CHECK(prod == r.value);
            CHECK(r.value == repunit_quotient(r.x, static_cast<unsigned>(c.q)));
            // class condition in exact integer form
            if (r.class_index >= 1) {
                Natural pk, pks;
                mpz_pow_ui(pk.get_mpz_t(), c.m_list[r.class_index - 1].get_mpz_t(),
                           r.exponents[r.class_index - 1]);
                mpz_pow_ui(pks.get_mpz_t(), pk.get_mpz_t(),
                           static_cast<unsigned long>(c.m_list.size()));
                CHECK(pks >= r.value);
            }
        }
    }
}

TEST_CASE("determinism: worker counts 1, 4, 16 give identical records") {
    auto r1 = enumerate_solutions(cfg(3, 1, {7}, 200000, false, 1));
    auto r4 = enumerate_solutions(cfg(3, 1, {7}, 200000, false, 4));
    auto r16 = enumerate_solutions(cfg(3, 1, {7}, 200000, false, 16));
    REQUIRE(r1.records.size() == r4.records.size());
    REQUIRE(r1.records.size() == r16.records.size());
    for (size_t i = 0; i < r1.records.size(); ++i) {
        CHECK(r1.records[i].x == r4.records[i].x);
        CHECK(r1.records[i].x == r16.records[i].x);
        CHECK(r1.records[i].exponents == r4.records[i].exponents);
        CHECK(r1.records[i].exponents == r16.records[i].exponents);
    }
}

TEST_CASE("non-coprime m-list falls back to exact DFS") {
    // 7 and 91 = 7*13 share a factor; 1183 = 7 * 13^2 has no representation,
    // 4459 = 7^3 * 13 = 7^2 * 91 does
    std::vector<Natural> ms = {Natural(7), Natural(91)};
    SearchConfig c;
    c.q = 3;
    c.A = 1;
    c.m_list = ms;
    c.x_min = 2;
    c.x_max = 2;
    auto res = enumerate_solutions(c);  // x=2: value 7 = 7^1 * 91^0
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].exponents == std::vector<unsigned>{1, 0});
}

TEST_CASE("verify_exponent_bounds over the ground-truth records") {
    auto res = enumerate_solutions(cfg(3, 1, {7}, 1000000));
    auto in = bound_inputs_for(3, Natural(1), {Natural(7)});
    auto rep = verify_exponent_bounds(res.records, in);
    CHECK(rep.ok);
    CHECK(rep.comparator_applicable);  // e=3 at x=18 is prime
    CHECK(rep.comparator_ok);
    CHECK(rep.max_ratio_log < 0);  // e_i well below U

    auto res5 = enumerate_solutions(cfg(5, 1, {11}, 1000000, true));
    auto in5 = bound_inputs_for(5, Natural(1), {Natural(11)});
    auto rep5 = verify_exponent_bounds(res5.records, in5);
    CHECK(rep5.ok);
    CHECK(rep5.comparator_applicable);  // e=2 prime
    CHECK(rep5.comparator_ok);

    auto vac = verify_exponent_bounds({}, in);
    CHECK(vac.ok);  // vacuous pass
}

TEST_CASE("lpf_scan spec points") {
    {
        auto r = lpf_scan(3, 3, 20, 0.0);
        CHECK(r.undecided == 0);
        CHECK(r.count == 18);
        CHECK(r.min_margin > 0);
        CHECK(r.nonpositive.empty());
    }
    {
        // q=3, around x=18: P = 7, rhs = (1/3) log log 18 ≈ 0.355
        auto r = lpf_scan(3, 18, 18, 0.0);
        CHECK(r.min_margin == doctest::Approx(7.0 - std::log(std::log(18.0)) / 3.0).epsilon(1e-9));
    }
    {
        // q=7, x = 10^4: rhs ≈ 2.2203, P is far larger
        auto r = lpf_scan(7, 10000, 10000, 0.0);
        CHECK(r.undecided == 0);
        CHECK(r.min_margin > 29.0 - 2.2204);
    }
}

TEST_CASE("lemma41 sweep finds the documented violations of the stated form") {
    // The inequality (3/4) H1 H2 <= gcd(q, p0-1) as stated fails when p0 = 2
    // or p0 | q (the q-th-power residue count mod p0^e is then larger than
    // gcd(q, p0-1)).  Smallest witness: p0=2, e=3, q=2, p1=3, p2=5.
    auto res = lemma41_verify(1000, 10, 20);
    CHECK(res.hypothesis_pairs > 0);
    REQUIRE(!res.violations.empty());
    bool has_smallest = false;
    for (const auto& v : res.violations) {
        CHECK(v.lhs > double(v.rhs));
        // every reported violation involves p0 = 2 or p0 | q
        CHECK((v.p0 == 2 || v.q % v.p0 == 0));
        // hypothesis really holds for the witness
        std::uint64_t pe = 1;
        for (std::uint64_t i = 0; i < v.e; ++i) pe *= v.p0;
        auto powmod = [&](std::uint64_t b, std::uint64_t ex) {
            unsigned __int128 acc = 1, bb = b % pe;
            while (ex) {
                if (ex & 1) acc = acc * bb % pe;
                bb = bb * bb % pe;
                ex >>= 1;
            }
            return static_cast<std::uint64_t>(acc);
        };
        CHECK(powmod(v.p1, v.q) == 1);
        CHECK(powmod(v.p2, v.q) == 1);
        if (v.p0 == 2 && v.e == 3 && v.q == 2 && v.p1 == 3 && v.p2 == 5) has_smallest = true;
    }
    CHECK(has_smallest);
}

TEST_CASE("lemma41: no violations with p0 odd and p0 not dividing q") {
    auto res = lemma41_verify(100000, 50, 100);
    for (const auto& v : res.violations) CHECK((v.p0 == 2 || v.q % v.p0 == 0));
}

TEST_CASE("lemma41 spec-quoted holding instances") {
    // (p0=7, e=1, q=3, p1=2, p2=11): lhs ≈ 1.709 <= gcd(3,6) = 3
    auto res = lemma41_verify(7, 3, 11);
    for (const auto& v : res.violations) {
        CHECK(!(v.p0 == 7 && v.q == 3 && v.p1 == 2 && v.p2 == 11));
    }
    // direct recomputation
    const double H1 = std::log(7.0) / std::log(2.0);
    const double H2 = std::log(7.0) / std::log(11.0);
    CHECK(0.75 * H1 * H2 == doctest::Approx(1.70864).epsilon(1e-4));
    CHECK(0.75 * H1 * H2 <= 3.0);
}

TEST_CASE("gap_check vacuous and synthetic cases") {
    auto res = enumerate_solutions(cfg(5, 1, {11}, 1000000, true));
    auto rep = gap_check(res.records, 5, 1);
    CHECK(rep.ok);
    CHECK(rep.pairs_checked == 0);  // single-element class

    // synthetic two-element class: q=3 ground truth x=2 and x=18 share class 1
    auto res3 = enumerate_solutions(cfg(3, 1, {7}, 1000000));
    auto rep3 = gap_check(res3.records, 3, 1);
    CHECK(rep3.pairs_checked == 1);
    // log 18 = 2.890 > (3*4/(4*3)) * log 2 = 0.693: holds
    CHECK(rep3.ok);
    CHECK_FALSE(rep3.sqrtq_applicable);  // 3 < 16e/9
}

TEST_CASE("count_vs_bound: q=5 m={11}") {
    auto res = enumerate_solutions(cfg(5, 1, {11}, 1000000, true));
    auto rep = count_vs_bound(res.records, 5, {Natural(11)});
    CHECK(rep.applicable);
    CHECK(rep.ok);
    CHECK(rep.count == 1);
    CHECK(rep.bound_value == doctest::Approx(38.7458737).epsilon(1e-6));
    // q=3: bound not applicable, count still reported
    auto res3 = enumerate_solutions(cfg(3, 1, {7}, 1000, true));
    auto rep3 = count_vs_bound(res3.records, 3, {Natural(7)});
    CHECK_FALSE(rep3.applicable);
    CHECK(rep3.ok);
    // empty record set: 0 <= bound
    auto repe = count_vs_bound({}, 5, {Natural(11)});
    CHECK(repe.ok);
    CHECK(repe.count == 0);
}
