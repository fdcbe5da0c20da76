#pragma once

#include <optional>

#include "hypid/arith.hpp"

namespace hypid {

// A generalized hypergeometric series pFq. Construction canonicalizes the
// parameter order (lexicographic by real then imaginary part) so any
// permutation of the inputs evaluates bit-identically.
struct HypSpec {
    ParamVec top;
    ParamVec bottom;
    HypSpec(ParamVec t, ParamVec b);
    int p() const { return static_cast<int>(top.size()); }
    int q() const { return static_cast<int>(bottom.size()); }
    // Smallest N with a top parameter within kIntSnapTol of -N, N >= 0.
    std::optional<long long> terminating_index() const;
    // Parametric excess s = sum(bottom) - sum(top); governs x=1 convergence
    // for p = q+1.
    Cx excess() const;
};

struct EvalReport {
    Cx value{0.0, 0.0};
    long long terms_used = 0;
    double tail_bound = 0.0;
    bool converged = false;
    // Largest |partial sum| encountered: a cancellation diagnostic; when it
    // dwarfs |value| the digits lost to cancellation are log10 of the ratio.
    double max_partial = 0.0;
};

// Global cap on summed terms (default 1e6); the HYPID_TERM_CAP environment
// variable and the check-harness config override it via set_term_cap.
long long term_cap();
void set_term_cap(long long cap);

// Truncated power series with recursive term update
// t_{k+1} = t_k * prod(top+k)/prod(bottom+k) * x/(k+1).
// Terminating series are summed exactly (N+1 terms, converged regardless of
// |x|). Non-terminating: requires |x| < 1 when p = q+1 (any x when p <= q);
// real x >= 1 and non-terminating p > q+1 raise NonConvergent. A bottom
// parameter hitting a non-positive integer before termination raises
// BottomPole. Stops after the geometric tail majorant satisfies
// tail <= rel_tol * max(1, |partial|) three consecutive times.
EvalReport eval_series(const HypSpec& spec, Cx x, double rel_tol);

// Series at x = 1 for p = q+1 (p <= q delegates to the power-series bound).
// Requires termination or Re(excess) > 0; the tail is estimated from the
// algebraic decay |t_k| ~ C k^{-Re(s)-1}. Honest failure: hitting the term
// cap reports converged = false rather than raising.
EvalReport eval_unit(const HypSpec& spec, double rel_tol);

// Left-hand side common to all identities here:
//   F(a, b, f+m; c, f | x)   (a absent for the confluent Kummer forms).
EvalReport eval_ipd_lhs(std::optional<Cx> a, Cx b, Cx c, const IpdSpec& spec, Cx x,
                        double rel_tol);

} // namespace hypid
