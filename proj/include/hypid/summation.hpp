#pragma once

// Unit-argument summation theorems built on the degenerate transformations:
// closed-form and quasi-closed evaluations of IPD series at x = 1, the
// contiguous-bottom reduction for series with a unit top parameter, and the
// beta-integral consistency check that rederives the terminating summation
// by Gauss-Jacobi quadrature.
//
// Every operation returns a Residual pairing the directly summed left side
// with the assembled right side. Parameter sets that violate a convergence
// or non-degeneracy precondition throw ConstraintViolation before any series
// is evaluated.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hypid/arith.hpp"
#include "hypid/transforms.hpp"

namespace hypid {

// Identifiers for the unit-argument cases used in reports.
enum class UnitId {
    THM4,      // one-sided closed form, Re(a+q) < 0
    THM5,      // terminating two-term evaluation
    THM6,      // non-terminating two-term evaluation
    COR7A,     // q = 0 specialization of the terminating form
    COR7B,     // q = 0 specialization of the non-terminating form
    RED_LEMMA, // unit-top contiguous-bottom reduction
    EX2,       // 4F3 chain with e - b a positive integer
    EX3_SUM,   // 4F3 with c = a + 2 and its closed specializations
    EX4,       // 6F5 instance of the non-terminating form
};

const char* unit_name(UnitId id);
UnitId unit_from_name(std::string_view name);

// F(a,b,f+m;b+m-q,f|1) against the gamma closed form carrying the reduced
// polynomial evaluated at t = a. Requires Re(a+q) < 0 for convergence; the
// left side is an algebraically decaying series, so pick rel_tol no tighter
// than the term cap can honour.
Residual karlsson_general(Cx a, Cx b, const IpdSpec& spec, int q,
                          double rel_tol = 1e-12);

// Terminating evaluation: F(-n,b,d,f+m;b+m-q,e,f|1) against the two-term
// right side (head over j = 0..q plus the reduced-root correction series).
// Both sides are finite sums. For n <= q the correction term is absent.
Residual thomae_like_1(int n, Cx b, Cx d, Cx e, const IpdSpec& spec, int q,
                       double rel_tol = 1e-12);

// Non-terminating evaluation: F(a,b,d,f+m;a+m-q,e,f|1) against the gamma
// prefactored head plus correction series. Requires Re(e-b-d-q) > 0.4 for
// the left side and Re(e-d) > 0.4 for the correction series (desk-scale
// margins so plain summation converges).
Residual thomae_like_2(Cx a, Cx b, Cx d, Cx e, const IpdSpec& spec, int q,
                       double rel_tol = 1e-12);

// q = 0 specializations in their re-summed corollary form.
// First: a must snap to a negative integer -n; checks
//   [(e)_n/(e-d)_n] F(-n,b,d,f+m;b+m,e,f|1) = B + (1-B) F'
// with B the head constant and F' the root-shifted terminating series.
// Second: checks F(a,b,d,f+m;a+m,e,f|1) against the gamma-prefactored
// one-plus-correction form.
Residual cor_q0_unit(Variant variant, Cx a, Cx b, Cx d, Cx e,
                     const IpdSpec& spec, double rel_tol = 1e-12);

// Contiguous-bottom reduction for a unit top parameter:
//   F(top,1;bottom,r|1)
// lowered to the series with all parameters shifted by -(r-1), up to a
// Pochhammer prefactor and a finite correction sum. r = 1 is the identity.
Residual pfq_unit_reduction(const ParamVec& top, const ParamVec& bottom,
                            int r_int, double rel_tol = 1e-12);

// The 4F3(a,b,d,f+1;a+1,b+r,f|1) chain: the one-parameter base form is
// reduced by pfq_unit_reduction's prefactor algebra to a Gauss-summable
// series, giving a closed form for every integer offset r >= 1. Checks the
// closed form against direct summation of the left side.
Residual example2_chain(Cx a, Cx b, Cx d, Cx f, int e_offset_r,
                        double rel_tol = 1e-12);

// Gauss-Jacobi rule on [-1,1] for weight (1-t)^alpha (1+t)^beta: the rule
// integrates weight times any polynomial of degree < 2n exactly. Nodes are
// ascending; weights include the weight-function mass.
struct JacobiRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

JacobiRule gauss_jacobi(int n, double alpha, double beta);

// Independent rederivation of the terminating unit evaluation: integrate the
// finite-x degenerate transformation's right side against the beta kernel
// x^{d-1} (1-x)^{e-d-1} on [0,1] by Gauss-Jacobi quadrature and divide by
// B(d,e-d). After clearing (1-x)^n the integrand is a polynomial, so the
// 64-node default is exact to roundoff. Requires real d > 0 and e - d > 0.
Residual beta_method_check(int n, Cx b, double d, double e,
                           const IpdSpec& spec, int q, int nodes = 64,
                           double rel_tol = 1e-12);

// One unit-argument verification case: the identity to run, its named scalar
// parameters (only the keys that identity reads: a, b, d, e, n, q, r_int),
// the IPD structure, and the tolerance the case is expected to meet.
struct UnitCase {
    UnitId identity_id;
    std::map<std::string, double> params;
    IpdSpec spec;
    double tol;
};

// Dispatch one case to its operation; rel_tol is the series stopping target.
// Missing parameter keys throw ConstraintViolation. RED_LEMMA cases read the
// left side as 3F2(a,b,1; e,r_int | 1); EX2 reads f from spec.f[0].
Residual run_unit_case(const UnitCase& c, double rel_tol = 1e-12);

} // namespace hypid
