#include "repq/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

namespace repq {

namespace {

bool pairwise_coprime(const std::vector<Natural>& ms) {
    for (size_t i = 0; i < ms.size(); ++i)
        for (size_t j = i + 1; j < ms.size(); ++j) {
            Natural g;
            mpz_gcd(g.get_mpz_t(), ms[i].get_mpz_t(), ms[j].get_mpz_t());
            if (g != 1) return false;
        }
    return true;
}

// Exact exponent vector with w = prod m_i^{e_i}, or nullopt.  Greedy maximal
// division works when the m_i are pairwise coprime; otherwise fall back to a
// bounded depth-first search.
std::optional<std::vector<unsigned>> represent_over(const Natural& w,
                                                    const std::vector<Natural>& ms,
                                                    bool coprime) {
    const size_t s = ms.size();
    std::vector<unsigned> e(s, 0);
    if (coprime) {
        Natural rest = w;
        for (size_t i = 0; i < s; ++i) {
            while (mpz_divisible_p(rest.get_mpz_t(), ms[i].get_mpz_t())) {
                mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(), ms[i].get_mpz_t());
                ++e[i];
            }
        }
        if (rest == 1) return e;
        return std::nullopt;
    }
    // DFS over exponents, largest modulus first
    std::vector<size_t> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return ms[a] > ms[b]; });
    std::optional<std::vector<unsigned>> found;
    auto rec = [&](auto&& self, size_t k, Natural rest) -> bool {
        if (rest == 1) {
            found = e;
            return true;
        }
        if (k == s) return false;
        const size_t i = order[k];
        unsigned cnt = 0;
        std::vector<Natural> stack{rest};
        while (mpz_divisible_p(stack.back().get_mpz_t(), ms[i].get_mpz_t())) {
            Natural nxt;
            mpz_divexact(nxt.get_mpz_t(), stack.back().get_mpz_t(), ms[i].get_mpz_t());
            stack.push_back(nxt);
            ++cnt;
        }
        for (unsigned c = cnt + 1; c-- > 0;) {  // try the largest exponent first
            e[i] = c;
            if (self(self, k + 1, stack[c])) return true;
        }
        e[i] = 0;
        return false;
    };
    rec(rec, 0, w);
    return found;
}

Factorization exact_factorization(const Natural& value, const Natural& A,
                                  const std::vector<Natural>& ms) {
    // value = A * prod m_i^{e_i} by construction, so its prime support is
    // contained in the supports of A and the m_i, which are desk-scale
    std::vector<Natural> primes;
    auto collect = [&](const Natural& n) {
        Factorization f = factor_with_budget(n, FactorBudget{100000, 10'000'000});
        for (const auto& fe : f.factors) primes.push_back(fe.prime);
        if (f.cofactor > 1) primes.push_back(f.cofactor);  // treat as opaque
    };
    if (A > 1) collect(A);
    for (const auto& m : ms) collect(m);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    std::vector<Natural> allowed;
    for (const auto& p : primes)
        if (is_prime(p)) allowed.push_back(p);
    return smooth_factor(value, allowed, Natural(0));
}

unsigned class_index_for(const Natural& value, const std::vector<Natural>& ms,
                         const std::vector<unsigned>& e) {
    // smallest i with m_i^(e_i * s) >= value, the exact integer form of the
    // 1/s-th-root condition.  Always exists for A = 1; 0 means "no class"
    // (possible only in the general-A extension).
    const size_t s = ms.size();
    for (size_t i = 0; i < s; ++i) {
        Natural pk, pks;
        mpz_pow_ui(pk.get_mpz_t(), ms[i].get_mpz_t(), e[i]);
        mpz_pow_ui(pks.get_mpz_t(), pk.get_mpz_t(), static_cast<unsigned long>(s));
        if (pks >= value) return static_cast<unsigned>(i + 1);
    }
    return 0;
}

}  // namespace

EnumerationResult enumerate_solutions(const SearchConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.m_list.empty()) throw std::invalid_argument("enumerate_solutions: empty m_list");
    if (cfg.x_min < 2) throw std::invalid_argument("enumerate_solutions: x_min must be >= 2");
    if (cfg.prime_only && cfg.A != 1)
        throw std::invalid_argument("enumerate_solutions: prime mode fixes A = 1");
    for (const auto& m : cfg.m_list)
        if (m < 2) throw std::invalid_argument("enumerate_solutions: m_i must be >= 2");

    const bool coprime = pairwise_coprime(cfg.m_list);
    const unsigned workers = std::max(1u, cfg.workers);

    // bound context shared by every record
    BoundInputs bi = bound_inputs_for(cfg.q, cfg.A, cfg.m_list);
    const BoundResult bound = theorem1_bound(bi);
    const double log_u_upper = bound.U.log_upper();
    UpperReal u_lower_probe = bound.U;  // compare exponents against the lower bracket

    if (cfg.x_max < cfg.x_min) return {};

    // contiguous chunks; merged output is sorted by x, so scheduling is invisible
    std::vector<std::pair<Natural, Natural>> chunks;
    Natural span = cfg.x_max - cfg.x_min + 1;
    Natural chunk = span / workers + 1;
    for (Natural lo = cfg.x_min; lo <= cfg.x_max; lo += chunk) {
        Natural hi = lo + chunk - 1;
        if (hi > cfg.x_max) hi = cfg.x_max;
        chunks.emplace_back(lo, hi);
    }

    std::vector<std::vector<SolutionRecord>> partial(chunks.size());
    std::vector<unsigned long long> scanned(chunks.size(), 0);

    auto scan_chunk = [&](size_t ci) {
        const auto& [lo, hi] = chunks[ci];
        for (Natural x = lo; x <= hi; ++x) {
            if (cfg.prime_only && !is_prime(x)) continue;
            ++scanned[ci];
            Natural v = repunit_quotient(x, static_cast<unsigned>(cfg.q));
            if (!mpz_divisible_p(v.get_mpz_t(), cfg.A.get_mpz_t())) continue;
            Natural w;
            mpz_divexact(w.get_mpz_t(), v.get_mpz_t(), cfg.A.get_mpz_t());
            auto e = represent_over(w, cfg.m_list, coprime);
            if (!e) continue;
            SolutionRecord rec;
            rec.x = x;
            rec.exponents = *e;
            rec.value = v;
            rec.factorization = exact_factorization(v, cfg.A, cfg.m_list);
            unsigned emax = 0;
            for (unsigned ei : *e) emax = std::max(emax, ei);
            rec.bound_check.log_u_upper = log_u_upper;
            rec.bound_check.all_below =
                emax == 0 || UpperReal::from_ui(emax).certified_lt(u_lower_probe);
            rec.class_index = class_index_for(v, cfg.m_list, *e);
            partial[ci].push_back(std::move(rec));
        }
    };

    if (workers == 1 || chunks.size() == 1) {
        for (size_t i = 0; i < chunks.size(); ++i) scan_chunk(i);
    } else {
        std::vector<std::thread> pool;
        for (size_t i = 0; i < chunks.size(); ++i) pool.emplace_back(scan_chunk, i);
        for (auto& th : pool) th.join();
    }

    EnumerationResult out;
    for (auto& part : partial)
        for (auto& r : part) out.records.push_back(std::move(r));
    std::sort(out.records.begin(), out.records.end(),
              [](const SolutionRecord& a, const SolutionRecord& b) { return a.x < b.x; });
    for (auto s : scanned) out.scanned += s;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

ExponentBoundReport verify_exponent_bounds(const std::vector<SolutionRecord>& records,
                                           const BoundInputs& in) {
    ExponentBoundReport rep;
    const BoundResult bound = theorem1_bound(in);
    const double log_u_lo = bound.U.log_lower();
    const UpperReal comp = bhm_comparator(in.q);
    const bool comp_ctx = in.m_list.size() == 1 && in.A == 1;
    for (const auto& rec : records) {
        for (size_t i = 0; i < rec.exponents.size(); ++i) {
            const unsigned e = rec.exponents[i];
            if (e == 0) continue;
            if (!UpperReal::from_ui(e).certified_lt(bound.U)) {
                rep.ok = false;
                rep.violations.push_back("e_" + std::to_string(i + 1) + " = " +
                                         std::to_string(e) + " not provably below U at x = " +
                                         rec.x.get_str());
            }
            rep.max_ratio_log = std::max(rep.max_ratio_log, std::log(double(e)) - log_u_lo);
        }
        if (comp_ctx && !rec.exponents.empty()) {
            const unsigned e1 = rec.exponents[0];
            if (e1 >= 2 && is_prime(Natural(e1))) {
                rep.comparator_applicable = true;
                if (!UpperReal::from_ui(e1).certified_leq(comp)) {
                    rep.comparator_ok = false;
                    rep.ok = false;
                    rep.violations.push_back("comparator fails at x = " + rec.x.get_str());
                }
            }
        }
    }
    return rep;
}

LpfScanResult lpf_scan(unsigned long q, const Natural& x_min, const Natural& x_max, double eps,
                       const FactorBudget& budget, unsigned workers) {
    if (x_min < 3) throw std::invalid_argument("lpf_scan: x_min must be >= 3 (log log x)");
    LpfScanResult out;
    if (x_max < x_min) return out;

    // trial primes restricted to the progression 1 mod q (plus q itself):
    // every prime factor of (x^q-1)/(x-1) lies there
    std::vector<std::uint64_t> trial = primes_in_ap(budget.trial_limit, q, 1);
    trial.insert(trial.begin(), q);

    std::vector<std::pair<Natural, Natural>> chunks;
    const unsigned nw = std::max(1u, workers);
    Natural span = x_max - x_min + 1;
    Natural chunk = span / nw + 1;
    for (Natural lo = x_min; lo <= x_max; lo += chunk) {
        Natural hi = lo + chunk - 1;
        if (hi > x_max) hi = x_max;
        chunks.emplace_back(lo, hi);
    }
    std::vector<LpfScanResult> partial(chunks.size());

    auto scan_chunk = [&](size_t ci) {
        LpfScanResult& acc = partial[ci];
        const auto& [lo, hi] = chunks[ci];
        for (Natural x = lo; x <= hi; ++x) {
            Natural n = repunit_quotient(x, static_cast<unsigned>(q));
            Natural best = 1, rest = n;
            for (std::uint64_t p : trial) {
                if (rest == 1) break;
                bool hit = false;
                while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
                    mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
                    hit = true;
                }
                if (hit && Natural(p) > best) best = Natural(p);
            }
            bool complete = true;
            if (rest > 1) {
                LargestPrimeFactor lp = largest_prime_factor(rest, budget);
                if (lp.prime > best) best = lp.prime;
                complete = lp.complete;
            }
            const double rhs = theorem3_rhs(q, eps, x);
            double pd = best.get_d();
            const double margin = pd - rhs;
            ++acc.count;
            if (!complete) ++acc.undecided;
            if (margin < acc.min_margin) {
                acc.min_margin = margin;
                acc.min_margin_x = x;
            }
            if (margin <= 0)
                acc.nonpositive.push_back({x, best, complete, rhs, margin});
        }
    };

    if (nw == 1 || chunks.size() == 1) {
        for (size_t i = 0; i < chunks.size(); ++i) scan_chunk(i);
    } else {
        std::vector<std::thread> pool;
        for (size_t i = 0; i < chunks.size(); ++i) pool.emplace_back(scan_chunk, i);
        for (auto& th : pool) th.join();
    }
    for (const auto& acc : partial) {
        out.count += acc.count;
        out.undecided += acc.undecided;
        if (acc.min_margin < out.min_margin) {
            out.min_margin = acc.min_margin;
            out.min_margin_x = acc.min_margin_x;
        }
        out.nonpositive.insert(out.nonpositive.end(), acc.nonpositive.begin(),
                               acc.nonpositive.end());
    }
    std::sort(out.nonpositive.begin(), out.nonpositive.end(),
              [](const LpfPoint& a, const LpfPoint& b) { return a.x < b.x; });
    return out;
}

Lemma41Result lemma41_verify(std::uint64_t p0e_max, std::uint64_t q_max, std::uint64_t p_max) {
    Lemma41Result out;
    const auto base_primes = primes_up_to(p_max);
    const auto p0_primes = primes_up_to(p0e_max);
    for (std::uint64_t p0 : p0_primes) {
        std::uint64_t pe = p0;
        std::uint64_t e = 1;
        while (pe <= p0e_max) {
            ++out.moduli_scanned;
            // running powers p^q mod pe for every base prime, q = 1..q_max
            std::vector<std::uint64_t> pw(base_primes.size());
            for (size_t i = 0; i < base_primes.size(); ++i) pw[i] = base_primes[i] % pe;
            std::vector<std::uint64_t> cur = pw;
            for (std::uint64_t q = 1; q <= q_max; ++q) {
                if (q > 1)
                    for (size_t i = 0; i < base_primes.size(); ++i)
                        cur[i] = static_cast<std::uint64_t>(
                            (static_cast<unsigned __int128>(cur[i]) * pw[i]) % pe);
                std::vector<size_t> hits;
                for (size_t i = 0; i < base_primes.size(); ++i)
                    if (base_primes[i] != p0 && cur[i] == 1) hits.push_back(i);
                if (hits.size() < 2) continue;
                const std::uint64_t rhs = std::gcd(q, p0 - 1);
                const double elogp0 = double(e) * std::log(double(p0));
                for (size_t a = 0; a < hits.size(); ++a) {
                    const double H1 = elogp0 / std::log(double(base_primes[hits[a]]));
                    for (size_t b = a + 1; b < hits.size(); ++b) {
                        ++out.hypothesis_pairs;
                        const double H2 = elogp0 / std::log(double(base_primes[hits[b]]));
                        const double lhs = 0.75 * H1 * H2;
                        if (lhs > double(rhs)) {
                            // re-verify with directed rounding before reporting
                            const unsigned prec = 128;
                            mpfr_t l, t1, t2;
                            mpfr_inits2(prec, l, t1, t2, static_cast<mpfr_ptr>(nullptr));
                            mpfr_set_ui(t1, p0, MPFR_RNDD);
                            mpfr_log(t1, t1, MPFR_RNDD);
                            mpfr_mul_ui(t1, t1, e, MPFR_RNDD);  // e log p0, down
                            mpfr_set_ui(t2, base_primes[hits[a]], MPFR_RNDU);
                            mpfr_log(t2, t2, MPFR_RNDU);
                            mpfr_div(l, t1, t2, MPFR_RNDD);  // H1 lower
                            mpfr_set_ui(t2, base_primes[hits[b]], MPFR_RNDU);
                            mpfr_log(t2, t2, MPFR_RNDU);
                            mpfr_div(t2, t1, t2, MPFR_RNDD);  // H2 lower
                            mpfr_mul(l, l, t2, MPFR_RNDD);
                            mpfr_mul_ui(l, l, 3, MPFR_RNDD);
                            mpfr_div_ui(l, l, 4, MPFR_RNDD);
                            const bool certified = mpfr_cmp_ui(l, rhs) > 0;
                            mpfr_clears(l, t1, t2, static_cast<mpfr_ptr>(nullptr));
                            if (certified)
                                out.violations.push_back({p0, e, q, base_primes[hits[a]],
                                                          base_primes[hits[b]], H1, H2, lhs, rhs,
                                                          false});
                        }
                    }
                }
            }
            if (pe > p0e_max / p0) break;
            pe *= p0;
            ++e;
        }
    }
    return out;
}

GapReport gap_check(const std::vector<SolutionRecord>& records, unsigned long q, std::size_t s) {
    GapReport rep;
    if (s == 0) throw std::invalid_argument("gap_check: s must be >= 1");
    rep.sqrtq_applicable =
        static_cast<double>(q) > (16.0 / 9.0) * std::exp(1.0) * std::pow(double(s), 4);
    const double ratio =
        3.0 * double(q - 1) * double(q - 1) / (4.0 * double(q) * double(s) * double(s));
    std::vector<std::vector<Natural>> classes(s + 1);
    for (const auto& rec : records)
        if (rec.class_index >= 1 && rec.class_index <= s)
            classes[rec.class_index].push_back(rec.x);
    for (size_t i = 1; i <= s; ++i) {
        auto& xs = classes[i];
        std::sort(xs.begin(), xs.end());
        for (size_t j = 0; j + 1 < xs.size(); ++j) {
            ++rep.pairs_checked;
            const double l1 = std::log(xs[j].get_d());
            const double l2 = std::log(xs[j + 1].get_d());
            const double need = ratio * l1;
            rep.min_margin = std::min(rep.min_margin, l2 - need);
            if (!(l2 > need)) {
                rep.ok = false;
                rep.violations.push_back("class " + std::to_string(i) + ": log " +
                                         xs[j + 1].get_str() + " <= " + std::to_string(ratio) +
                                         " * log " + xs[j].get_str());
            }
            if (rep.sqrtq_applicable) {
                const double need2 = std::sqrt(double(q)) * l1;
                rep.min_margin = std::min(rep.min_margin, l2 - need2);
                if (!(l2 > need2)) {
                    rep.ok = false;
                    rep.violations.push_back("class " + std::to_string(i) +
                                             ": sqrt(q) gap fails between " + xs[j].get_str() +
                                             " and " + xs[j + 1].get_str());
                }
            }
        }
    }
    return rep;
}

CountReport count_vs_bound(const std::vector<SolutionRecord>& records, unsigned long q,
                           const std::vector<Natural>& m_list) {
    CountReport rep;
    const std::size_t s = m_list.size();
    CountBound cb = theorem4_count_bound(q, m_list);
    rep.applicable = cb.applicable;
    rep.count = records.size();
    rep.bound_log = cb.bound.log_lower();
    rep.bound_value = std::exp(cb.bound.log_lower());
    if (rep.applicable && rep.count > 0 &&
        !UpperReal::from_ui(rep.count).certified_leq(cb.bound))
        rep.ok = false;
    rep.class_counts.assign(s, 0);
    for (const auto& rec : records)
        if (rec.class_index >= 1 && rec.class_index <= s) ++rep.class_counts[rec.class_index - 1];
    // per-class expression 2 log(s q U/(q-1))/log q + 1 with the computed U
    BoundInputs bi = bound_inputs_for(q, Natural(1), m_list);
    const BoundResult b = theorem1_bound(bi);
    const double logU = b.U.log_upper();
    rep.per_class_bound =
        2.0 * (std::log(double(s) * double(q) / double(q - 1)) + logU) / std::log(double(q)) + 1.0;
    for (std::size_t i = 0; i < s; ++i)
        if (double(rep.class_counts[i]) > rep.per_class_bound) rep.ok = false;
    return rep;
}

}  // namespace repq
