// Rigorous evaluation of every explicit constant and exponent bound:
// c2(m), the two main theorem bounds, the simplified log estimate, the
// solution-count bound, the linear-form lower bound and reference comparators.
#pragma once

#include "repq/numbers.hpp"
#include "repq/quadfield.hpp"
#include "repq/upper_real.hpp"

namespace repq {

struct BoundInputs {
    unsigned long q;
    Natural A{1};
    std::vector<Natural> m_list;  // strictly ascending, each >= 2
    unsigned h = 1;
    UpperReal R;  // regulator as a value (zero for imaginary fields)
};

/// Regulator of the field as a certified value, recomputed from the exact unit.
UpperReal regulator_value(const FieldInvariants& inv);

BoundInputs bound_inputs_for(unsigned long q, const Natural& A,
                             const std::vector<Natural>& m_list);

/// c2(m) = 1500 * 38^(m+1) * (m+1)^(3m+9), exactly.
Natural c2_exact(unsigned m);
UpperReal c2_value(unsigned m);

/// c7 = 2^12 * 38^2 * 1500^2 = 13307904000000.
Natural c7_exact();

/// max(x, 2) on plain doubles (the angle-bracket operator).
double at_least_two(double x);

/// Worst case A' = A * prod m_i^(h-1) over the unspecified v_i.
UpperReal a_prime_worst(const BoundInputs& in);

enum class BoundBranch { MsTerm, QTerm, BakerTerm };

struct BoundResult {
    UpperReal U;
    BoundBranch branch;
    bool real_case;
    UpperReal c_big;     // C0/C1 (resp. C2/C3)
    UpperReal a_prime;   // the A' the bound was evaluated with
    UpperReal term[3];   // branch values (term[0] unused in the imaginary case)
};

/// Exponent bound of the main theorem; the final h-1 is added in both cases.
BoundResult theorem1_bound(const BoundInputs& in);
BoundResult theorem1_bound_with_aprime(const BoundInputs& in, const Natural& a_prime);

/// The binary-quadratic-form version: same shape with (c0, c1) free,
/// 0 < c1 < 1/2.  theorem1_bound must agree with it at (D, c0, c1) = (±q, 2, 1/q).
BoundResult theorem2_bound(long D, const Natural& A, const UpperReal& c0, const UpperReal& c1,
                           const std::vector<Natural>& m_list, unsigned h, const UpperReal& R);

/// Right side of the simplified estimate:
/// log c7 + 2s log 38 + (6s+4) log(s+2) + 3 sum_{i>=2} log log m_i + 5 log q.
UpperReal simple_log_U(unsigned long q, const std::vector<Natural>& m_list);

struct CountBound {
    UpperReal bound;   // s*((log c7 + 19 s log(s+2) + 3 sum log log m_i)/log q + 7)
    bool applicable;   // q prime and q > (16/9) e s^4
};
CountBound theorem4_count_bound(unsigned long q, const std::vector<Natural>& m_list);

struct Prop1Result {
    UpperReal magnitude;   // c2(m) k^(m+2) h_1...h_m log(2mB/h_m); the bound is exp(-magnitude)
    bool cond_height_ok;   // B >= h_m exp(4(m+1)(7+3 log(m+1)))
    bool cond_degree_ok;   // 7 + 3 log(m+1) >= log k
    bool applicable;       // both preconditions certified
    UpperReal b_threshold;
};
/// Lower bound for |Lambda|, reported as the log magnitude with lower-bound
/// semantics (use magnitude.log-upper side when certifying |Lambda| >= exp(-M)).
Prop1Result prop1_lower_bound(unsigned m, unsigned k, const std::vector<UpperReal>& h_list,
                              const UpperReal& B);

/// ((q-1)/6 - eps) * log log x.  eps = 0 is allowed as a stronger-than-stated probe.
double theorem3_rhs(unsigned long q, double eps, const Natural& x);

/// Reference value 9000 q^2 log^4 q.
UpperReal bhm_comparator(unsigned long q);

}  // namespace repq
