// Desk-scale enumeration of the divisor equations, largest-prime-factor
// scans, and brute-force verification of the combinatorial lemmas.
#pragma once

#include <optional>

#include "repq/bounds.hpp"

namespace repq {

struct SearchConfig {
    unsigned long q = 3;
    Natural A{1};
    std::vector<Natural> m_list;
    Natural x_min{2};
    Natural x_max{1000000};
    bool prime_only = false;  // restricts x to primes (A forced to 1)
    unsigned workers = 1;
};

struct BoundCheck {
    double log_u_upper;  // upper bracket of log U used
    bool all_below;
};

struct SolutionRecord {
    Natural x;
    std::vector<unsigned> exponents;
    Natural value;
    Factorization factorization;
    BoundCheck bound_check;
    unsigned class_index;  // 1-based set index; m_i^(e_i s) >= value, smallest i
};

struct EnumerationResult {
    std::vector<SolutionRecord> records;  // sorted by x
    std::vector<Natural> undecided;
    unsigned long long scanned = 0;
    double seconds = 0;
};

EnumerationResult enumerate_solutions(const SearchConfig& cfg);

struct ExponentBoundReport {
    bool ok = true;
    double max_ratio_log = -1e300;  // max over records of log e_i - log U (should be << 0)
    bool comparator_applicable = false;
    bool comparator_ok = true;
    std::vector<std::string> violations;
};

/// Checks e_i < U for every record; when s = 1, A = 1 and e_1 is prime, also
/// checks the reference comparator e_1 <= 9000 q^2 log^4 q.
ExponentBoundReport verify_exponent_bounds(const std::vector<SolutionRecord>& records,
                                           const BoundInputs& in);

struct LpfPoint {
    Natural x;
    Natural largest_prime;
    bool complete;
    double rhs;
    double margin;
};

struct LpfScanResult {
    double min_margin = 1e300;
    Natural min_margin_x{0};
    std::vector<LpfPoint> nonpositive;  // flagged points (expected empty)
    std::uint64_t undecided = 0;
    std::uint64_t count = 0;
};

/// For each x in [x_min, x_max]: P = largest prime factor of (x^q-1)/(x-1),
/// margin = P - ((q-1)/6 - eps) log log x.
LpfScanResult lpf_scan(unsigned long q, const Natural& x_min, const Natural& x_max, double eps,
                       const FactorBudget& budget = {}, unsigned workers = 1);

struct LemmaWitness {
    std::uint64_t p0, e, q, p1, p2;
    double H1, H2, lhs;
    std::uint64_t rhs;
    bool holds;
};

struct Lemma41Result {
    std::vector<LemmaWitness> violations;
    std::uint64_t hypothesis_pairs = 0;  // tuples where both congruences held
    std::uint64_t moduli_scanned = 0;
};

/// Exhaustive sweep: p0 prime, p0^e <= p0e_max, 1 <= q <= q_max, primes
/// p1 < p2 <= p_max distinct from p0 with p_i^q ≡ 1 (mod p0^e); whenever the
/// hypothesis holds, tests (3/4) H1 H2 <= gcd(q, p0-1).  Candidate violations
/// are re-verified with directed rounding before being reported.
Lemma41Result lemma41_verify(std::uint64_t p0e_max, std::uint64_t q_max, std::uint64_t p_max);

struct GapReport {
    bool ok = true;
    std::size_t pairs_checked = 0;
    double min_margin = 1e300;
    bool sqrtq_applicable = false;
    std::vector<std::string> violations;
};

/// Within each class R_i, consecutive solutions must satisfy
/// log x_{j+1} > (3(q-1)^2 / (4 q s^2)) log x_j, and log x_{j+1} > sqrt(q) log x_j
/// when q > (16/9) e s^4.
GapReport gap_check(const std::vector<SolutionRecord>& records, unsigned long q, std::size_t s);

struct CountReport {
    bool ok = true;
    bool applicable = false;
    std::size_t count = 0;
    double bound_log = 0;  // log of the count bound (lower bracket)
    double bound_value = 0;
    std::vector<std::size_t> class_counts;
    double per_class_bound = 0;
};

CountReport count_vs_bound(const std::vector<SolutionRecord>& records, unsigned long q,
                           const std::vector<Natural>& m_list);

}  // namespace repq
