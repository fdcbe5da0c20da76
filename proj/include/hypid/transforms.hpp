#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypid/arith.hpp"
#include "hypid/hyp.hpp"

namespace hypid {

// Catalog of finite-argument identities plus the limit identity that seeds
// the r=m=1 warm-ups. Names are stable CLI identifiers.
enum class IdentityId {
    MP1, MP2, MP3,
    THM1, THM2, THM3,
    COR1A, COR1B, COR2, COR2ALT,
    COR3A, COR3B, COR4,
    COR5A, COR5B, COR6,
    INTRO_A, INTRO_B, LIMIT_M1,
};

const char* identity_name(IdentityId id);
IdentityId identity_from_name(std::string_view name);   // ParseError on unknown

// Which printed form of a corollary family to evaluate.
enum class Variant { First, Kummer, Second, SecondAlt };

// One evaluated identity: both sides, their series reports, and anything
// noteworthy that happened along the way (e.g. a vanishing reduced
// polynomial, which removes the tail but leaves the identity checkable).
struct Residual {
    Cx lhs{};
    Cx rhs{};
    double abs_err = 0.0;
    double rel_err = 0.0;   // abs_err / max(|lhs|, |rhs|, 1)
    EvalReport lhs_report;
    EvalReport rhs_report;
    std::vector<std::string> flags;
};

// Assemble a Residual from two side values and their series reports;
// abs/rel errors follow the convention above.
Residual make_residual(Cx lhs, Cx rhs, const EvalReport& lhs_report,
                       const EvalReport& rhs_report, std::vector<std::string> flags = {});

// First transformation: F(a,b,f+m;c,f|x) against (1-x)^{-a} times the
// characteristic-root series in x/(x-1).
Residual mp_first(Cx a, Cx b, Cx c, const IpdSpec& spec, Cx x, double rel_tol = 1e-12);

// Exponential (Kummer-type) transformation: F(b,f+m;c,f|x) against
// e^x times the root series in -x.
Residual mp_kummer(Cx b, Cx c, const IpdSpec& spec, Cx x, double rel_tol = 1e-12);

// Second transformation: prefactor (1-x)^{c-a-b-m} and roots of the second
// characteristic polynomial, argument kept at x.
Residual mp_second(Cx a, Cx b, Cx c, const IpdSpec& spec, Cx x, double rel_tol = 1e-12);

// Degenerate c = b+m-q: finite q-sum of limit values plus a reduced-root
// tail. A reduced polynomial that vanishes identically is flagged
// ("ZeroReducedPolynomial"), the tail dropped, and the check still made.
Residual thm1_degenerate(Cx a, Cx b, const IpdSpec& spec, int q, Cx x, double rel_tol = 1e-12);

// Exponential analogue of the above (no parameter a, argument -x on the tail).
Residual thm2_degenerate_kummer(Cx b, const IpdSpec& spec, int q, Cx x, double rel_tol = 1e-12);

// Degenerate c = a+m-q: second-kind limit values and reduced roots.
Residual thm3_degenerate(Cx a, Cx b, const IpdSpec& spec, int q, Cx x, double rel_tol = 1e-12);

// q = 0 corollaries. First/Kummer take the weight (b)_m/(f)_m; Second is the
// rearranged two-term form; SecondAlt uses the explicit constant A. `a` is
// required except for Kummer.
Residual cor_q0(Variant v, std::optional<Cx> a, Cx b, const IpdSpec& spec, Cx x,
                double rel_tol = 1e-12);

// q = m-1 corollaries (c = b+1 resp. a+1). The partial-sum coefficients are
// cross-checked against the terminating-series form of the limit values.
Residual cor_qm1(Variant v, std::optional<Cx> a, Cx b, const IpdSpec& spec, Cx x,
                 double rel_tol = 1e-12);

// q = m-2 corollaries (c = b+2 resp. a+2, m_total >= 2). The single reduced
// root is taken from its closed first-product formula and cross-checked
// against the numerical root.
Residual cor_qm2(Variant v, std::optional<Cx> a, Cx b, const IpdSpec& spec, Cx x,
                 double rel_tol = 1e-12);

// The two r=m=1 warm-up identities for (1-x)^b 3F2(a,b,f+1;a+1,f|x):
// First keeps argument x, Second moves to x/(x-1).
Residual intro_identities(Variant which, Cx a, Cx b, Cx f, Cx x, double rel_tol = 1e-12);

// Generating limit: F(eps, a..; alpha*eps, b..|x) against
// 1 - 1/alpha + (1/alpha) F(a..; b..|x), evaluated at a small finite eps.
Residual limit_m1(const ParamVec& top, const ParamVec& bottom, Cx alpha, Cx x,
                  double eps = 1e-6, double rel_tol = 1e-12);

} // namespace hypid
