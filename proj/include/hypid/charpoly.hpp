#pragma once

#include <vector>

#include "hypid/arith.hpp"

namespace hypid {

// Polynomial with ascending complex coefficients. Horner evaluation is the
// canonical semantics. `scale` records the largest term magnitude seen while
// assembling the coefficients; the identically-zero test and the leading
// trim are relative to it, because these polynomials arise from sums that
// may cancel exactly.
struct CPoly {
    ParamVec coeffs;   // ascending; empty encodes the identically-zero polynomial
    double scale = 1.0;

    CPoly() = default;
    // Trims leading coefficients with |c| <= 1e-12 * scale; a poly whose
    // coefficients all fall under the threshold becomes identically zero.
    CPoly(ParamVec raw, double assembly_scale);

    int degree() const { return static_cast<int>(coeffs.size()) - 1; } // -1 when zero
    bool is_zero() const { return coeffs.empty(); }
    Cx eval(Cx t) const;
};

struct RootSet {
    ParamVec roots;                 // sorted lexicographically (re, im)
    std::vector<double> residuals;  // |p(root)| / sum_k |c_k||root|^k
};

// C_{k,r}: expansion coefficients connecting the IPD structure to the
// characteristic polynomials. Computed by BOTH closed forms (Stirling/sigma
// and terminating-series); they must agree to 1e-10 or an Error (bug trap)
// is thrown. Returns the Stirling-form value.
Cx ckr(int k, const IpdSpec& spec);

// First characteristic polynomial Q_m(t), degree m_total. Throws
// DegenerateNormalizer when (c-b-m)_m vanishes (c-b within snap tolerance of
// {1..m}); that regime belongs to the limit machinery below.
CPoly qm_poly(Cx b, Cx c, const IpdSpec& spec);

// Second characteristic polynomial Q^_m(t), degree m_total, recovered by
// interpolation at t = 0..m. Throws DegenerateNormalizer when (c-a-m)_m or
// (c-b-m)_m vanishes.
CPoly qmhat_poly(Cx a, Cx b, Cx c, const IpdSpec& spec);

// Reduced polynomial R_{m-q-1}(t) of the first limit lemma, degree m-q-1.
// Assembled in monomial form from the defining sum; the alternative closed
// form is assembled alongside and the two must agree coefficient-wise to
// 1e-10 (including simultaneous vanishing). Identically zero output is legal
// (it flags the degenerate parameter condition) and reported via is_zero().
CPoly r_poly(Cx b, const IpdSpec& spec, int q);

// Reduced polynomial R^_{m-q-1}(t) of the second limit lemma, degree m-q-1,
// recovered by interpolation. Requires a-b outside {q+1-m,...,q} (snap
// tolerance 1e-9); violations throw ConstraintViolation.
CPoly rhat_poly(Cx a, Cx b, const IpdSpec& spec, int q);

// Limit values Q_m^0(-l) and Q^_m^0(-l), 0 <= l <= q (both equal 1 at l=0).
Cx q0_value(Cx b, const IpdSpec& spec, int q, int l);
Cx qhat0_value(Cx a, Cx b, const IpdSpec& spec, int q, int l);

// Closed-form special values R_{m-q-1}(-q-1) and R^_{m-q-1}(-q-1); each must
// match Horner evaluation of the corresponding polynomial to 1e-10.
Cx r_at(Cx b, const IpdSpec& spec, int q);
Cx rhat_at(Cx a, Cx b, const IpdSpec& spec, int q);

// All complex roots by Aberth-Ehrlich iteration with one Newton polish per
// root. Throws IdenticallyZero for the zero polynomial and IllConditioned
// when some relative residual exceeds 1e-8 after polishing.
RootSet roots(const CPoly& p);

// One epsilon-perturbation study realizing a limit lemma numerically.
struct LimitStudy {
    std::vector<double> eps;                 // as requested, decreasing
    ParamVec predicted;                      // {0,-1,...,-q} then reduced-poly roots
    std::vector<ParamVec> perturbed_roots;   // per eps, aligned with `predicted`
    std::vector<double> match_err;           // per eps: max |root - predicted|
    std::vector<Cx> ratio;                   // per eps: eps / root-near-zero
    Cx predicted_ratio;                      // R(0)/(m-q-1)!  or  (-1)^{q+1} R^(0)
    Cx extrapolated_ratio;                   // Richardson on the last two ratios
    double slope;                            // log-log fit of match_err vs eps
};

// First lemma: perturb c = c_base + eps with c_base = b + m - q; roots of
// Q_m cluster onto {0,-1,...,-q} and the roots of R_{m-q-1}.
LimitStudy lemma1_limit_study(Cx b, Cx c_base, const IpdSpec& spec, int q,
                              const std::vector<double>& eps_list = {1e-3, 1e-4, 1e-5});

// Second lemma: perturb c = c_base + eps with c_base = a + m - q; roots of
// Q^_m cluster onto {0,-1,...,-q} and the roots of R^_{m-q-1}.
LimitStudy lemma2_limit_study(Cx a, Cx b, Cx c_base, const IpdSpec& spec, int q,
                              const std::vector<double>& eps_list = {1e-3, 1e-4, 1e-5});

} // namespace hypid
