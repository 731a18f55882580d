#include "repq/numbers.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace repq {

Natural Factorization::reconstruct() const {
    Natural prod = cofactor;
    for (const auto& fe : factors) {
        Natural pk;
        mpz_pow_ui(pk.get_mpz_t(), fe.prime.get_mpz_t(), fe.exponent);
        prod *= pk;
    }
    return prod;
}

Natural repunit_quotient(const Natural& x, unsigned q) {
    if (x < 2) throw std::invalid_argument("repunit_quotient: x must be >= 2");
    if (q < 3 || q % 2 == 0 || !is_prime(Natural(q)))
        throw std::invalid_argument("repunit_quotient: q must be an odd prime");
    Natural num;
    mpz_pow_ui(num.get_mpz_t(), x.get_mpz_t(), q);
    num -= 1;
    Natural den = x - 1;
    Natural out, rem;
    mpz_tdiv_qr(out.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (rem != 0) throw std::logic_error("repunit_quotient: non-exact division");
    return out;
}

namespace {

bool mr_witness_passes(const Natural& n, const Natural& base) {
    // returns true if n passes (is a probable prime) for this base
    Natural a = base % n;
    if (a == 0) return true;
    Natural d = n - 1;
    unsigned long r = mpz_scan1(d.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), r);
    Natural x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) return true;
    for (unsigned long i = 1; i < r; ++i) {
        mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
        if (x == n - 1) return true;
    }
    return false;
}

// Witnesses deciding primality for every n < 3.3e24 > 2^64 (Sorenson-Webster set).
constexpr unsigned kSmallWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
// First 64 primes, used as fixed bases above 2^64.
constexpr unsigned kWideWitnesses[] = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

}  // namespace

bool is_prime(const Natural& n) {
    if (n < 2) return false;
    static const unsigned kTiny[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (unsigned p : kTiny) {
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    const bool narrow = mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
    if (narrow) {
        for (unsigned w : kSmallWitnesses)
            if (!mr_witness_passes(n, Natural(w))) return false;
        return true;
    }
    for (unsigned w : kWideWitnesses)
        if (!mr_witness_passes(n, Natural(w))) return false;
    return true;
}

Factorization smooth_factor(const Natural& n, const std::vector<Natural>& allowed,
                            const Natural& trial_limit) {
    if (n < 1) throw std::invalid_argument("smooth_factor: n must be >= 1");
    std::map<Natural, unsigned> found;
    Natural rest = n;
    for (const auto& p : allowed) {
        if (p < 2 || !is_prime(p))
            throw std::invalid_argument("smooth_factor: allowed set must contain primes");
        unsigned e = 0;
        while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
            mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
            ++e;
        }
        if (e) found[p] += e;
    }
    if (trial_limit > 2 && rest > 1) {
        std::uint64_t lim = trial_limit.fits_ulong_p() ? trial_limit.get_ui()
                                                       : std::uint64_t(1) << 31;
        for (std::uint64_t p : primes_up_to(lim - 1)) {
            if (Natural(p) * Natural(p) > rest) {
                // rest is now 1 or prime
                if (rest > 1 && rest < trial_limit) {
                    found[rest] += 1;
                    rest = 1;
                }
                break;
            }
            unsigned e = 0;
            while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
                mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
                ++e;
            }
            if (e) found[Natural(p)] += e;
            if (rest == 1) break;
        }
    }
    Factorization out;
    for (const auto& [p, e] : found) out.factors.push_back({p, e});
    out.cofactor = rest;
    return out;
}

namespace {

// Brent-style Pollard rho; returns a nontrivial factor or 0 on budget exhaustion.
Natural rho_factor(const Natural& n, std::uint64_t max_iters) {
    if (mpz_even_p(n.get_mpz_t())) return 2;
    std::uint64_t spent = 0;
    for (unsigned long c = 1; c < 32 && spent < max_iters; ++c) {
        Natural y = 2, q = 1, g = 1, x, ys = 2;
        std::uint64_t r = 1;
        const std::uint64_t m = 128;
        while (g == 1 && spent < max_iters) {
            x = y;
            for (std::uint64_t i = 0; i < r && spent < max_iters; ++i, ++spent)
                y = (y * y + c) % n;
            std::uint64_t k = 0;
            while (k < r && g == 1 && spent < max_iters) {
                ys = y;
                const std::uint64_t steps = std::min(m, r - k);
                for (std::uint64_t i = 0; i < steps; ++i) {
                    y = (y * y + c) % n;
                    Natural d = x > y ? x - y : y - x;
                    q = q * d % n;
                }
                spent += steps;
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += steps;
            }
            r *= 2;
        }
        if (g == n) {
            // gcd collapsed inside a batch; redo that batch one step at a time
            do {
                ys = (ys * ys + c) % n;
                Natural d = x > ys ? x - ys : ys - x;
                mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != n && g != 1) return g;
        // g == n is degenerate for this polynomial: try the next c
    }
    return 0;
}

void factor_rec(const Natural& n, const FactorBudget& budget, std::map<Natural, unsigned>& out,
                Natural& giveup) {
    if (n == 1) return;
    if (is_prime(n)) {
        out[n] += 1;
        return;
    }
    // peel perfect powers first; rho then only needs the base
    if (mpz_perfect_power_p(n.get_mpz_t())) {
        for (unsigned k = 2; k <= mpz_sizeinbase(n.get_mpz_t(), 2); ++k) {
            Natural root;
            if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k)) {
                std::map<Natural, unsigned> sub;
                Natural sub_giveup = 1;
                factor_rec(root, budget, sub, sub_giveup);
                if (sub_giveup == 1) {
                    for (auto& [p, e] : sub) out[p] += e * k;
                    return;
                }
                break;
            }
        }
    }
    Natural d = rho_factor(n, budget.rho_iterations);
    if (d == 0) {
        giveup *= n;
        return;
    }
    factor_rec(d, budget, out, giveup);
    Natural rest;
    mpz_divexact(rest.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    factor_rec(rest, budget, out, giveup);
}

}  // namespace

Factorization factor_with_budget(const Natural& n, const FactorBudget& budget) {
    if (n < 1) throw std::invalid_argument("factor_with_budget: n must be >= 1");
    std::map<Natural, unsigned> found;
    Natural rest = n;
    for (std::uint64_t p : primes_up_to(budget.trial_limit)) {
        if (rest == 1) break;
        unsigned e = 0;
        while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
            mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
            ++e;
        }
        if (e) found[Natural(p)] += e;
    }
    Natural giveup = 1;
    if (rest > 1) factor_rec(rest, budget, found, giveup);
    Factorization out;
    for (const auto& [p, e] : found) out.factors.push_back({p, e});
    out.cofactor = giveup;
    return out;
}

LargestPrimeFactor largest_prime_factor(const Natural& n, const FactorBudget& budget) {
    if (n < 2) throw std::invalid_argument("largest_prime_factor: n must be >= 2");
    Factorization f = factor_with_budget(n, budget);
    LargestPrimeFactor out{Natural(1), f.cofactor == 1, f.cofactor};
    if (!f.factors.empty()) out.prime = f.factors.back().prime;
    return out;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit, std::uint64_t sieve_cap) {
    return primes_in_ap(limit, 1, 0, sieve_cap);
}

std::vector<std::uint64_t> primes_in_ap(std::uint64_t limit, std::uint64_t modulus,
                                        std::uint64_t residue, std::uint64_t sieve_cap) {
    if (limit > sieve_cap)
        throw std::length_error("primes_in_ap: limit exceeds the sieve memory cap (" +
                                std::to_string(sieve_cap) + ")");
    const bool all = (residue == 0);  // residue 0 selects every prime
    if (!all) {
        if (modulus == 0 || std::gcd(modulus, residue) != 1)
            throw std::invalid_argument("primes_in_ap: residue and modulus must be coprime");
    }
    std::vector<std::uint64_t> out;
    if (limit < 2) return out;
    std::vector<bool> comp(limit + 1, false);
    for (std::uint64_t p = 2; p * p <= limit; ++p) {
        if (comp[p]) continue;
        for (std::uint64_t k = p * p; k <= limit; k += p) comp[k] = true;
    }
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (comp[p]) continue;
        if (all || p % modulus == residue % modulus) out.push_back(p);
    }
    return out;
}

int jacobi(const Natural& a, const Natural& n) {
    if (n < 1 || mpz_even_p(n.get_mpz_t()))
        throw std::invalid_argument("jacobi: n must be odd and positive");
    return mpz_jacobi(a.get_mpz_t(), n.get_mpz_t());
}

Natural isqrt(const Natural& n) {
    if (n < 0) throw std::invalid_argument("isqrt: negative argument");
    Natural r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_perfect_square(const Natural& n) {
    return n >= 0 && mpz_perfect_square_p(n.get_mpz_t());
}

}  // namespace repq
