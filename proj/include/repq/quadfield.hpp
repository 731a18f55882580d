// Quadratic field Q(sqrt(D)) for D = (-1)^((q-1)/2) q: invariants, prime
// splitting, norm equations and principal-ideal decomposition witnesses.
#pragma once

#include <optional>
#include <vector>

#include "repq/numbers.hpp"

namespace repq {

struct FieldDescriptor {
    long D;  // squarefree, D ≡ 1 (mod 4); here always ±q for an odd prime q
    bool real() const { return D > 0; }
    unsigned long q() const { return static_cast<unsigned long>(D > 0 ? D : -D); }
};

/// D = (-1)^((q-1)/2) q.  Rejects even or composite q.
FieldDescriptor field_descriptor(unsigned long q);

/// Element (a + b sqrt(D))/2 of the half-integer order; a ≡ b (mod 2).
struct QuadInt {
    Natural a, b;
    long D = 0;

    QuadInt() = default;
    QuadInt(Natural a_, Natural b_, long D_);

    QuadInt conj() const { return QuadInt(a, -b, D); }
    Natural norm() const;  // (a^2 - D b^2) / 4, always an integer
    QuadInt operator*(const QuadInt& o) const;
    QuadInt operator-() const { return QuadInt(-a, -b, D); }
    bool operator==(const QuadInt& o) const { return a == o.a && b == o.b && D == o.D; }
    QuadInt pow(unsigned long e) const;

    /// Sign of the real embedding a + b sqrt(D) (D > 0), exactly.
    int sign_real() const;
    bool divisible_by_int(const Natural& n) const;
};

QuadInt qi_one(long D);

/// Exact comparison of real embeddings (D > 0): sign of x - y.
int cmp_real(const QuadInt& x, const QuadInt& y);

/// Field division x / y; nullopt when the quotient is not in the order.
std::optional<QuadInt> divide_exact(const QuadInt& x, const QuadInt& y);

struct FieldInvariants {
    FieldDescriptor fd;
    unsigned h;         // ideal (wide) class number
    unsigned h_narrow;  // form-class count; differs from h only when N(eps) = +1
    QuadInt eps;        // fundamental unit > 1 (real case; 1 otherwise)
    int eps_norm;       // ±1 (real case)
    double regulator;   // log eps, 0 for imaginary fields
    unsigned torsion_order;  // 6 for D = -3, else 2

    std::vector<QuadInt> torsion_units() const;
};

/// Class number by reduced-form enumeration (imaginary) / form-cycle counting
/// (real), unit and regulator by the continued fraction of sqrt(D).
/// Enforces the h, R <= sqrt(q) log(4q) sanity bound; violations throw.
FieldInvariants field_invariants(unsigned long q);

struct PrimeIdealRep {
    Natural p;
    Natural b;  // ideal (p, (b + sqrt(D))/2), b^2 ≡ D (mod 4p), 0 < b < 2p
};

/// Representation of one prime ideal above a split p.  Rejects inert or
/// ramified p.  Deterministic: smallest valid b.
PrimeIdealRep split_prime(const Natural& p, const FieldDescriptor& fd);

enum class NormMode { AllPrimitive, All, One };

/// Elements of norm N up to units and conjugation.  Imaginary: canonical
/// representatives with a,b >= 0.  Real: normalized to sqrt(N) <= mu < eps sqrt(N)
/// (equivalently 0 < conj(mu) <= mu).  Empty result means no representation.
std::vector<QuadInt> norm_equation(const FieldDescriptor& fd, const Natural& N,
                                   NormMode mode = NormMode::AllPrimitive,
                                   const FieldInvariants* inv = nullptr);

/// True iff gcd(X, Y) is a power of |D| (including 1): no prime ideal other
/// than the ramified one divides both conjugates (X ± Y sqrt(D))/2.
bool coprimality_condition(const Natural& X, const Natural& Y, const FieldDescriptor& fd);

struct DecompositionWitness {
    QuadInt alpha_prime;
    std::vector<QuadInt> mu;   // generators actually used (conjugates allowed)
    long unit_exponent;        // eps exponent (real) / torsion index (imaginary)
    std::vector<unsigned> u;   // e_i = h u_i + v_i
    std::vector<unsigned> v;
};

/// Writes (X + Y sqrt(D))/2 = alpha' * eps^u0 * prod mu_i^{u_i} (real case;
/// torsion omega^u0 in the imaginary case), verified by exact multiplication.
DecompositionWitness decompose_solution(const Natural& X, const Natural& Y,
                                        const FieldDescriptor& fd, const Natural& A,
                                        const std::vector<Natural>& m_list,
                                        const std::vector<unsigned>& e_list,
                                        const FieldInvariants& inv);

}  // namespace repq
