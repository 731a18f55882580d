// Exact integer arithmetic, primality, smoothness factoring and sieving.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace repq {

using Natural = mpz_class;

struct FactorEntry {
    Natural prime;
    unsigned exponent;
};

/// Partial factorization: ascending prime powers times an unfactored cofactor.
struct Factorization {
    std::vector<FactorEntry> factors;
    Natural cofactor{1};

    Natural reconstruct() const;
    bool verify(const Natural& n) const { return reconstruct() == n; }
};

/// (x^q - 1) / (x - 1) = 1 + x + ... + x^(q-1).  Requires x >= 2 and q an odd prime.
Natural repunit_quotient(const Natural& x, unsigned q);

/// Deterministic below 2^64 (fixed witness set); 64 fixed-base Miller-Rabin
/// rounds above (composite escape probability < 4^-64 = 2^-128, stable across runs).
bool is_prime(const Natural& n);

/// Divides out powers of `allowed` primes, then all primes < trial_limit.
/// Whatever remains is the cofactor; the input is always exactly reconstructible.
Factorization smooth_factor(const Natural& n, const std::vector<Natural>& allowed,
                            const Natural& trial_limit);

struct FactorBudget {
    std::uint64_t trial_limit = 100000;
    std::uint64_t rho_iterations = 50'000'000;  // per composite cofactor
};

struct LargestPrimeFactor {
    Natural prime;       // largest prime found (exact when complete)
    bool complete;       // false => `prime` is only a lower bound
    Natural unfactored;  // 1 when complete, else the composite remainder
};

/// Largest prime factor of n >= 2 under an effort cap; degrades to a lower
/// bound plus the unfactored cofactor instead of stalling.
LargestPrimeFactor largest_prime_factor(const Natural& n, const FactorBudget& budget = {});

/// Full factorization attempt under the same budget (cofactor > 1 on give-up).
Factorization factor_with_budget(const Natural& n, const FactorBudget& budget = {});

/// All primes <= limit congruent to `residue` mod `modulus`, ascending.
/// residue 0 with modulus 1 means "all primes".  Sieve memory is capped.
std::vector<std::uint64_t> primes_in_ap(std::uint64_t limit, std::uint64_t modulus,
                                        std::uint64_t residue,
                                        std::uint64_t sieve_cap = (1ull << 31));

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit,
                                        std::uint64_t sieve_cap = (1ull << 31));

/// Jacobi symbol (a/n) for odd n >= 1.
int jacobi(const Natural& a, const Natural& n);

/// floor(sqrt(n)) for n >= 0.
Natural isqrt(const Natural& n);

bool is_perfect_square(const Natural& n);

}  // namespace repq
