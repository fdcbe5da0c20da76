#include "hypid/summation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "hypid/charpoly.hpp"
#include "hypid/hyp.hpp"

namespace hypid {
namespace {

// Desk-scale convergence margin: unit-argument excesses closer to the
// divergence boundary than this are rejected rather than summed slowly.
constexpr double kExcessMargin = 0.4;

double fact(int n) {
    double v = 1.0;
    for (int k = 2; k <= n; ++k) v *= k;
    return v;
}

Cx from_int(int n) { return Cx(static_cast<double>(n), 0.0); }

EvalReport exact_report(Cx value) {
    EvalReport rep;
    rep.value = value;
    rep.terms_used = 0;
    rep.tail_bound = 0.0;
    rep.converged = true;
    rep.max_partial = std::abs(value);
    return rep;
}

void append_shifted(ParamVec& dst, const ParamVec& src, Cx delta) {
    for (const Cx& z : src) dst.push_back(z + delta);
}

Cx shifted_product(const ParamVec& v, Cx delta) {
    Cx p = 1.0;
    for (const Cx& z : v) p *= z + delta;
    return p;
}

void require_poch_nonzero(Cx z, int n, const char* label) {
    for (int i = 0; i < n; ++i)
        if (std::abs(z + from_int(i)) <= kIntSnapTol)
            throw ConstraintViolation(std::string(label) + " vanishes");
}

void require_not_nonpos_int(Cx z, const char* label) {
    if (is_nonpositive_integer(z))
        throw ConstraintViolation(std::string(label) + " is a non-positive integer");
}

void require_q_range(int q, int m) {
    if (q < 0 || q >= m)
        throw ConstraintViolation("q must lie in [0, m_total-1]");
}

// f_j - base must avoid the integers {m-q-m_j,...,0}: on that set the
// reduced polynomial changes shape and the identities do not apply as
// written.
void require_f_window_clear(Cx base, const IpdSpec& spec, int q, const char* label) {
    const int m = spec.m_total();
    for (int j = 0; j < spec.r(); ++j) {
        for (int t = m - q - spec.m[j]; t <= 0; ++t)
            if (std::abs(spec.f[static_cast<size_t>(j)] - base - from_int(t)) <= kIntSnapTol)
                throw ConstraintViolation(std::string(label) +
                                          ": an f_j - shift difference hits the excluded integer window");
    }
}

void require_ab_clear(Cx a, Cx b, int q, int m) {
    for (int t = q + 1 - m; t <= q; ++t)
        if (std::abs(a - b - from_int(t)) <= kIntSnapTol)
            throw ConstraintViolation("a-b hits the excluded integer window");
}

void require_gamma_regular(Cx z, const char* label) {
    if (is_nonpositive_integer(z))
        throw ConstraintViolation(std::string(label) + " is at a gamma pole");
}

void require_excess(Cx s, const char* label) {
    if (s.real() <= kExcessMargin)
        throw ConstraintViolation(std::string(label) +
                                  ": unit-argument excess too close to divergence");
}

// Gauss sum of 2F1(aa,bb;cc|1) in gamma form; valid for Re(cc-aa-bb) > 0.
Cx gauss_unit(Cx aa, Cx bb, Cx cc) {
    require_gamma_regular(cc, "2F1 bottom parameter");
    require_gamma_regular(cc - aa, "2F1 gamma argument c-a");
    require_gamma_regular(cc - bb, "2F1 gamma argument c-b");
    return gamma_ratio({cc, cc - aa - bb}, {cc - aa, cc - bb});
}

} // namespace

const char* unit_name(UnitId id) {
    switch (id) {
        case UnitId::THM4: return "THM4";
        case UnitId::THM5: return "THM5";
        case UnitId::THM6: return "THM6";
        case UnitId::COR7A: return "COR7a";
        case UnitId::COR7B: return "COR7b";
        case UnitId::RED_LEMMA: return "RED_LEMMA";
        case UnitId::EX2: return "EX2";
        case UnitId::EX3_SUM: return "EX3_SUM";
        case UnitId::EX4: return "EX4";
    }
    throw Error("unknown unit-case id");
}

UnitId unit_from_name(std::string_view name) {
    std::string low(name);
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    static const std::pair<const char*, UnitId> table[] = {
        {"thm4", UnitId::THM4},           {"thm5", UnitId::THM5},
        {"thm6", UnitId::THM6},           {"cor7a", UnitId::COR7A},
        {"cor7b", UnitId::COR7B},         {"red_lemma", UnitId::RED_LEMMA},
        {"ex2", UnitId::EX2},             {"ex3_sum", UnitId::EX3_SUM},
        {"ex4", UnitId::EX4},
    };
    for (const auto& [key, id] : table)
        if (low == key) return id;
    throw ParseError("unknown unit-case name: " + std::string(name));
}

Residual karlsson_general(Cx a, Cx b, const IpdSpec& spec, int q, double rel_tol) {
    const int m = spec.m_total();
    require_q_range(q, m);
    const Cx c = b + from_int(m - q);
    require_not_nonpos_int(c, "b+m-q");
    require_f_window_clear(b, spec, q, "gamma-form unit summation");
    require_excess(-a - from_int(q), "left side");
    require_gamma_regular(b - a + from_int(m - q), "b-a+m-q");

    ParamVec top{a, b};
    append_shifted(top, spec.f_plus_m(), 0.0);
    ParamVec bot{c};
    append_shifted(bot, spec.f, 0.0);
    const EvalReport lhs_rep = eval_unit(HypSpec(std::move(top), std::move(bot)), rel_tol);

    const Cx rhs = gamma_ratio({c, 1.0 - a}, {b - a + from_int(m - q)}) *
                   r_poly(b, spec, q).eval(a) / fact(m - q - 1);
    return make_residual(lhs_rep.value, rhs, lhs_rep, exact_report(rhs));
}

Residual thomae_like_1(int n, Cx b, Cx d, Cx e, const IpdSpec& spec, int q, double rel_tol) {
    const int m = spec.m_total();
    require_q_range(q, m);
    if (n < 1) throw ConstraintViolation("n must be a positive integer");
    const Cx c = b + from_int(m - q);
    require_not_nonpos_int(c, "b+m-q");
    require_f_window_clear(b, spec, q, "terminating unit evaluation");
    require_poch_nonzero(e, n, "(e)_n");
    require_poch_nonzero(1.0 + d - e - from_int(n), q, "(1+d-e-n)_q");
    if (n > q + 1)
        require_poch_nonzero(2.0 + d + from_int(q) - e - from_int(n), n - q - 1,
                             "(2+d+q-e-n)_{n-q-1}");

    ParamVec lt{from_int(-n), b, d};
    append_shifted(lt, spec.f_plus_m(), 0.0);
    ParamVec lb{c, e};
    append_shifted(lb, spec.f, 0.0);
    const EvalReport lhs_rep = eval_unit(HypSpec(std::move(lt), std::move(lb)), rel_tol);

    Cx head = 0.0;
    for (int j = 0; j <= q; ++j)
        head += pochhammer(from_int(-n), j) * pochhammer(from_int(-q), j) * pochhammer(d, j) *
                q0_value(b, spec, q, j) /
                (pochhammer(c, j) * pochhammer(1.0 + d - e - from_int(n), j) * fact(j));
    head *= pochhammer(e - d, n) / pochhammer(e, n);

    // Correction term, absent for n <= q. The coefficient carries (d)_{q+1}
    // from the beta-kernel moment of y^{q+1}; see beta_method_check for the
    // independent quadrature derivation.
    std::vector<std::string> flags;
    EvalReport tail_rep = exact_report(0.0);
    Cx tail_value = 0.0;
    if (n > q) {
        const CPoly red = r_poly(b, spec, q);
        if (red.is_zero()) {
            flags.emplace_back("ZeroReducedPolynomial");
        } else {
            const RootSet lam = roots(red);
            const Cx coef = pow_int(Cx(-1.0, 0.0), q + 1) * pochhammer(from_int(-n), q + 1) *
                            pochhammer(d, q + 1) * pochhammer(e - d, n - q - 1) *
                            r_at(b, spec, q) /
                            (pochhammer(c, q + 1) * pochhammer(e, n) * fact(m - q - 1));
            ParamVec tt{from_int(q + 1 - n), Cx(1.0, 0.0), d + from_int(q + 1)};
            append_shifted(tt, lam.roots, from_int(q + 2));
            ParamVec tb{b + from_int(m + 1), 2.0 + d + from_int(q) - e - from_int(n)};
            append_shifted(tb, lam.roots, from_int(q + 1));
            tail_rep = eval_unit(HypSpec(std::move(tt), std::move(tb)), rel_tol);
            tail_value = coef * tail_rep.value;
        }
    }
    return make_residual(lhs_rep.value, head + tail_value, lhs_rep, tail_rep, std::move(flags));
}

Residual thomae_like_2(Cx a, Cx b, Cx d, Cx e, const IpdSpec& spec, int q, double rel_tol) {
    const int m = spec.m_total();
    require_q_range(q, m);
    const Cx c = a + from_int(m - q);
    require_not_nonpos_int(c, "a+m-q");
    require_ab_clear(a, b, q, m);
    require_f_window_clear(a, spec, q, "unit evaluation (second kind)");
    require_excess(e - b - d - from_int(q), "left side");
    require_excess(e - d, "correction series");
    require_gamma_regular(e, "e");
    require_gamma_regular(e - b - from_int(q), "e-b-q");
    require_gamma_regular(e - b + 1.0, "e-b+1");

    ParamVec lt{a, b, d};
    append_shifted(lt, spec.f_plus_m(), 0.0);
    ParamVec lb{c, e};
    append_shifted(lb, spec.f, 0.0);
    const EvalReport lhs_rep = eval_unit(HypSpec(std::move(lt), std::move(lb)), rel_tol);

    const Cx pref = gamma_ratio({e, e - b - d - from_int(q)}, {e - d, e - b - from_int(q)});
    Cx head = 0.0;
    for (int j = 0; j <= q; ++j)
        head += pochhammer(from_int(-q), j) * pochhammer(a - b - from_int(q), j) *
                pochhammer(d, j) * qhat0_value(a, b, spec, q, j) /
                (pochhammer(c, j) * pochhammer(e - b - from_int(q), j) * fact(j));
    head *= pref;

    std::vector<std::string> flags;
    EvalReport tail_rep = exact_report(0.0);
    Cx tail_value = 0.0;
    const CPoly red = rhat_poly(a, b, spec, q);
    if (red.is_zero()) {
        flags.emplace_back("ZeroReducedPolynomial");
    } else {
        const RootSet gam = roots(red);
        const Cx coef = gamma_ratio({e, e - b - d - from_int(q)}, {e - d, e - b + 1.0}) *
                        pochhammer(b - a, q + 1) * pochhammer(d, q + 1) *
                        rhat_at(a, b, spec, q) / pochhammer(c, q + 1);
        ParamVec tt{Cx(1.0, 0.0), a - b + 1.0, d + from_int(q + 1)};
        append_shifted(tt, gam.roots, from_int(q + 2));
        ParamVec tb{a + from_int(m + 1), e - b + 1.0};
        append_shifted(tb, gam.roots, from_int(q + 1));
        tail_rep = eval_unit(HypSpec(std::move(tt), std::move(tb)), rel_tol);
        tail_value = coef * tail_rep.value;
    }
    return make_residual(lhs_rep.value, head + tail_value, lhs_rep, tail_rep, std::move(flags));
}

Residual cor_q0_unit(Variant variant, Cx a, Cx b, Cx d, Cx e, const IpdSpec& spec,
                     double rel_tol) {
    const int m = spec.m_total();

    if (variant == Variant::First) {
        if (!is_nonpositive_integer(a) || snap_integer(a) > -1)
            throw ConstraintViolation("first variant requires a = -n with integer n >= 1");
        const int n = static_cast<int>(-snap_integer(a));
        const Cx c = b + from_int(m);
        require_not_nonpos_int(c, "b+m");
        require_f_window_clear(b, spec, 0, "q = 0 unit corollary");
        require_poch_nonzero(e, n, "(e)_n");
        require_poch_nonzero(e - d, n, "(e-d)_n");
        require_poch_nonzero(1.0 + d - e - from_int(n), n, "(1-e+d-n)_n");

        ParamVec lt{from_int(-n), b, d};
        append_shifted(lt, spec.f_plus_m(), 0.0);
        ParamVec lb{c, e};
        append_shifted(lb, spec.f, 0.0);
        const EvalReport lhs_rep = eval_unit(HypSpec(std::move(lt), std::move(lb)), rel_tol);
        const Cx lhs = pochhammer(e, n) / pochhammer(e - d, n) * lhs_rep.value;

        const CPoly red = r_poly(b, spec, 0);
        if (red.is_zero())
            throw IdenticallyZero("reduced polynomial vanished outside the excluded window");
        const RootSet lam = roots(red);
        const Cx big_b = pochhammer(b, m) / pochhammer_ipd(spec, 0.0);

        ParamVec rt{from_int(-n), Cx(1.0, 0.0), d};
        append_shifted(rt, lam.roots, 1.0);
        ParamVec rb{c, 1.0 + d - e - from_int(n)};
        append_shifted(rb, lam.roots, 0.0);
        const EvalReport rhs_rep = eval_unit(HypSpec(std::move(rt), std::move(rb)), rel_tol);
        return make_residual(lhs, big_b + (1.0 - big_b) * rhs_rep.value, lhs_rep, rhs_rep);
    }

    if (variant != Variant::Second)
        throw Error("cor_q0_unit takes Variant::First or Variant::Second");

    const Cx c = a + from_int(m);
    require_not_nonpos_int(c, "a+m");
    require_ab_clear(a, b, 0, m);
    require_f_window_clear(a, spec, 0, "q = 0 unit corollary (second kind)");
    require_excess(e - b - d, "left side");
    require_excess(e - d, "correction series");
    require_gamma_regular(e, "e");
    require_gamma_regular(e - b, "e-b");

    ParamVec lt{a, b, d};
    append_shifted(lt, spec.f_plus_m(), 0.0);
    ParamVec lb{c, e};
    append_shifted(lb, spec.f, 0.0);
    const EvalReport lhs_rep = eval_unit(HypSpec(std::move(lt), std::move(lb)), rel_tol);

    const CPoly red = rhat_poly(a, b, spec, 0);
    if (red.is_zero())
        throw IdenticallyZero("reduced polynomial vanished outside the excluded window");
    const RootSet gam = roots(red);

    const Cx pref = gamma_ratio({e, e - b - d}, {e - d, e - b});
    const Cx ratio = a * shifted_product(spec.f_plus_m(), 0.0) /
                     ((a + from_int(m)) * shifted_product(spec.f, 0.0));
    const Cx coef = b * d / (e - b) * (ratio - 1.0);
    ParamVec rt{Cx(1.0, 0.0), a - b + 1.0, d + 1.0};
    append_shifted(rt, gam.roots, 2.0);
    ParamVec rb{c + 1.0, e - b + 1.0};
    append_shifted(rb, gam.roots, 1.0);
    const EvalReport rhs_rep = eval_unit(HypSpec(std::move(rt), std::move(rb)), rel_tol);
    return make_residual(lhs_rep.value, pref * (1.0 + coef * rhs_rep.value), lhs_rep, rhs_rep);
}

Residual pfq_unit_reduction(const ParamVec& top, const ParamVec& bottom, int r_int,
                            double rel_tol) {
    if (r_int < 1) throw ConstraintViolation("r must be a positive integer");
    for (const Cx& ai : top) require_poch_nonzero(1.0 - ai, r_int - 1, "(1-a)_{r-1}");
    for (const Cx& bi : bottom)
        require_poch_nonzero(bi - from_int(r_int - 1), r_int - 2, "(b-r+1)_{r-2}");

    ParamVec lt = top;
    lt.push_back(Cx(1.0, 0.0));
    ParamVec lb = bottom;
    lb.push_back(from_int(r_int));
    const EvalReport lhs_rep =
        eval_series(HypSpec(std::move(lt), std::move(lb)), Cx(1.0, 0.0), rel_tol);

    ParamVec st, sb;
    append_shifted(st, top, from_int(1 - r_int));
    append_shifted(sb, bottom, from_int(1 - r_int));
    const EvalReport inner_rep = eval_series(HypSpec(st, sb), Cx(1.0, 0.0), rel_tol);

    Cx corr = 0.0;
    for (int j = 0; j <= r_int - 2; ++j)
        corr += pochhammer_vec(st, j) / (pochhammer_vec(sb, j) * fact(j));

    Cx pref = fact(r_int - 1);
    for (const Cx& bi : bottom) pref *= pochhammer(1.0 - bi, r_int - 1);
    for (const Cx& ai : top) pref /= pochhammer(1.0 - ai, r_int - 1);
    const long long par = static_cast<long long>(r_int - 1) *
                          (static_cast<long long>(top.size()) -
                           static_cast<long long>(bottom.size()));
    if (par % 2 != 0) pref = -pref;

    const Cx rhs = pref * (inner_rep.value - corr);
    return make_residual(lhs_rep.value, rhs, lhs_rep, inner_rep);
}

Residual example2_chain(Cx a, Cx b, Cx d, Cx f, int e_offset_r, double rel_tol) {
    const int r = e_offset_r;
    if (r < 1) throw ConstraintViolation("e - b must be a positive integer offset");
    if (std::abs(a - b) <= kIntSnapTol)
        throw ConstraintViolation("a = b makes the chain coefficient singular");
    if (std::abs(f) <= kIntSnapTol) throw ConstraintViolation("f must be nonzero");
    const Cx e = b + from_int(r);
    require_not_nonpos_int(a + 1.0, "a+1");
    require_not_nonpos_int(e, "b+r");
    require_not_nonpos_int(f, "f");
    require_excess(from_int(r) - d, "left side");
    require_excess(b - d + from_int(r), "reduced series");
    require_gamma_regular(e, "b+r");
    require_poch_nonzero(1.0 - d, r - 1, "(1-d)_{r-1}");
    require_poch_nonzero(1.0 - a + b, r - 1, "(1-a+b)_{r-1}");

    ParamVec lt{a, b, d, f + 1.0};
    ParamVec lb{a + 1.0, e, f};
    const EvalReport lhs_rep = eval_unit(HypSpec(std::move(lt), std::move(lb)), rel_tol);

    // Lower the embedded unit-top series by r-1, then close it by the Gauss
    // sum. r = 1 needs no lowering.
    const Cx g = gauss_unit(d - from_int(r - 1), a - b - from_int(r - 1),
                            a + 2.0 - from_int(r));
    Cx corr = 0.0;
    for (int j = 0; j <= r - 2; ++j)
        corr += pochhammer(d - from_int(r - 1), j) * pochhammer(a - b - from_int(r - 1), j) /
                (pochhammer(a + 2.0 - from_int(r), j) * fact(j));
    Cx inner = g - corr;
    if (r > 1) {
        Cx red = pochhammer(-a, r - 1) * fact(r - 1) /
                 (pochhammer(1.0 - d, r - 1) * pochhammer(1.0 - a + b, r - 1));
        if ((r - 1) % 2 != 0) red = -red;
        inner *= red;
    }

    const Cx big_k = b * (a - f) / ((a - b) * f);
    const Cx pref = gamma_ratio({e, from_int(r) - d}, {e - d, from_int(r)});
    const Cx rhs = pref * (1.0 - big_k * (1.0 - inner));
    return make_residual(lhs_rep.value, rhs, lhs_rep, exact_report(inner));
}

JacobiRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw ConstraintViolation("gauss_jacobi: need at least one node");
    if (alpha <= -1.0 || beta <= -1.0)
        throw ConstraintViolation("gauss_jacobi: exponents must exceed -1");
    const double ab = alpha + beta;

    // Orthonormal three-term recurrence for the weight (1-t)^alpha (1+t)^beta:
    //   sq[k+1] p_{k+1} = (t - diag[k]) p_k - sq[k] p_{k-1},  p_0 = 1/sq[0],
    // where sq[0]^2 is the total weight mass and sq[k]^2 the monic norm
    // ratios. Gauss weights are the reciprocal Christoffel sums.
    std::vector<double> diag(n), sq(static_cast<size_t>(n) + 1);
    diag[0] = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        const double t2 = 2.0 * k + ab;
        diag[k] = (beta * beta - alpha * alpha) / (t2 * (t2 + 2.0));
    }
    sq[0] = std::sqrt(std::exp((ab + 1.0) * std::numbers::ln2 + std::lgamma(alpha + 1.0) +
                               std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0)));
    sq[1] = std::sqrt(4.0 * (alpha + 1.0) * (beta + 1.0) /
                      ((ab + 2.0) * (ab + 2.0) * (ab + 3.0)));
    for (int k = 2; k <= n; ++k) {
        const double t2 = 2.0 * k + ab;
        sq[static_cast<size_t>(k)] = std::sqrt(4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
                                               (t2 * t2 * (t2 + 1.0) * (t2 - 1.0)));
    }

    struct Eval {
        double pn;   // orthonormal p_n(t)
        double kern; // sum of p_0(t)^2 .. p_{n-1}(t)^2
    };
    auto eval = [&](double t) -> Eval {
        double pm = 0.0, pc = 1.0 / sq[0];
        double kern = pc * pc;
        for (int k = 0; k < n; ++k) {
            const double pn =
                ((t - diag[k]) * pc - sq[static_cast<size_t>(k)] * pm) / sq[static_cast<size_t>(k) + 1];
            pm = pc;
            pc = pn;
            if (k + 1 < n) kern += pc * pc;
        }
        return {pc, kern};
    };

    // The n simple roots all lie in (-1,1); bracket them on a cosine-spaced
    // grid (denser near the endpoints, matching root clustering) and bisect.
    std::vector<double> found;
    int grid = 8 * n;
    for (int attempt = 0; attempt < 4; ++attempt) {
        found.clear();
        double tprev = -std::cos(0.0);
        double fprev = eval(tprev).pn;
        for (int i = 1; i <= grid; ++i) {
            const double tcur = -std::cos(std::numbers::pi * i / grid);
            const double fcur = eval(tcur).pn;
            if (fprev == 0.0) {
                found.push_back(tprev);
            } else if (fprev * fcur < 0.0) {
                double lo = tprev, hi = tcur, flo = fprev;
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = eval(mid).pn;
                    if (fm == 0.0) {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if (flo * fm < 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                found.push_back(0.5 * (lo + hi));
            }
            tprev = tcur;
            fprev = fcur;
        }
        if (static_cast<int>(found.size()) == n) break;
        grid *= 4;
    }
    if (static_cast<int>(found.size()) != n)
        throw IllConditioned("gauss_jacobi: failed to isolate all quadrature nodes");

    JacobiRule rule;
    rule.nodes = std::move(found);
    rule.weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        rule.weights[static_cast<size_t>(i)] = 1.0 / eval(rule.nodes[static_cast<size_t>(i)]).kern;
    return rule;
}

Residual beta_method_check(int n, Cx b, double d, double e, const IpdSpec& spec, int q,
                           int nodes, double rel_tol) {
    const int m = spec.m_total();
    require_q_range(q, m);
    if (n < 1) throw ConstraintViolation("n must be a positive integer");
    if (nodes < 2 || nodes > 512) throw ConstraintViolation("node count out of range");
    if (d <= 0.05 || e - d <= 0.05)
        throw ConstraintViolation("beta kernel requires d > 0 and e - d > 0");
    const Cx c = b + from_int(m - q);
    require_not_nonpos_int(c, "b+m-q");
    require_f_window_clear(b, spec, q, "beta-method consistency check");

    ParamVec lt{from_int(-n), b, Cx(d, 0.0)};
    append_shifted(lt, spec.f_plus_m(), 0.0);
    ParamVec lb{c, Cx(e, 0.0)};
    append_shifted(lb, spec.f, 0.0);
    const EvalReport lhs_rep = eval_unit(HypSpec(std::move(lt), std::move(lb)), rel_tol);

    // Right side: the finite-x degenerate transformation at a = -n gives a
    // head polynomial in y = x/(x-1) plus a terminating correction series;
    // multiplied by (1-x)^n it is a polynomial in x of degree <= n, so the
    // quadrature below is exact to roundoff.
    std::vector<Cx> q0(static_cast<size_t>(q) + 1);
    for (int j = 0; j <= q; ++j) q0[static_cast<size_t>(j)] = q0_value(b, spec, q, j);
    const CPoly red = r_poly(b, spec, q);
    const bool with_tail = n > q && !red.is_zero();
    Cx tail_const = 0.0;
    ParamVec tt, tb;
    if (with_tail) {
        const RootSet lam = roots(red);
        tail_const = pochhammer(from_int(-n), q + 1) * r_at(b, spec, q) /
                     (pochhammer(c, q + 1) * fact(m - q - 1));
        tt = {Cx(1.0, 0.0), from_int(q + 1 - n)};
        append_shifted(tt, lam.roots, from_int(q + 2));
        tb = {b + from_int(m + 1)};
        append_shifted(tb, lam.roots, from_int(q + 1));
    }

    const JacobiRule rule = gauss_jacobi(nodes, e - d - 1.0, d - 1.0);
    Cx acc = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double x = 0.5 * (1.0 + rule.nodes[static_cast<size_t>(i)]);
        const Cx y(x / (x - 1.0), 0.0);
        Cx g = 0.0;
        for (int j = 0; j <= q; ++j)
            g += pochhammer(from_int(-n), j) * pochhammer(from_int(-q), j) *
                 q0[static_cast<size_t>(j)] / (pochhammer(c, j) * fact(j)) * pow_int(y, j);
        if (with_tail)
            g += pow_int(y, q + 1) * tail_const * eval_series(HypSpec(tt, tb), y, rel_tol).value;
        acc += rule.weights[static_cast<size_t>(i)] *
               std::pow(1.0 - x, static_cast<double>(n)) * g;
    }
    const Cx integral = std::pow(2.0, 1.0 - e) * acc;
    const Cx beta = gamma_ratio({Cx(d, 0.0), Cx(e - d, 0.0)}, {Cx(e, 0.0)});
    return make_residual(lhs_rep.value, integral / beta, lhs_rep, exact_report(integral));
}

namespace {

double need(const std::map<std::string, double>& p, const char* key) {
    auto it = p.find(key);
    if (it == p.end())
        throw ConstraintViolation(std::string("missing case parameter: ") + key);
    return it->second;
}

int need_int(const std::map<std::string, double>& p, const char* key) {
    return static_cast<int>(std::llround(need(p, key)));
}

} // namespace

Residual run_unit_case(const UnitCase& c, double rel_tol) {
    const auto& p = c.params;
    switch (c.identity_id) {
        case UnitId::THM4:
            return karlsson_general(Cx(need(p, "a")), Cx(need(p, "b")), c.spec,
                                    need_int(p, "q"), rel_tol);
        case UnitId::THM5:
            return thomae_like_1(need_int(p, "n"), Cx(need(p, "b")), Cx(need(p, "d")),
                                 Cx(need(p, "e")), c.spec, need_int(p, "q"), rel_tol);
        case UnitId::THM6:
        case UnitId::EX4:
            return thomae_like_2(Cx(need(p, "a")), Cx(need(p, "b")), Cx(need(p, "d")),
                                 Cx(need(p, "e")), c.spec, need_int(p, "q"), rel_tol);
        case UnitId::COR7A:
            return cor_q0_unit(Variant::First, Cx(-static_cast<double>(need_int(p, "n"))),
                               Cx(need(p, "b")), Cx(need(p, "d")), Cx(need(p, "e")), c.spec,
                               rel_tol);
        case UnitId::COR7B:
        case UnitId::EX3_SUM:
            return cor_q0_unit(Variant::Second, Cx(need(p, "a")), Cx(need(p, "b")),
                               Cx(need(p, "d")), Cx(need(p, "e")), c.spec, rel_tol);
        case UnitId::RED_LEMMA:
            return pfq_unit_reduction({Cx(need(p, "a")), Cx(need(p, "b"))},
                                      {Cx(need(p, "e"))}, need_int(p, "r_int"), rel_tol);
        case UnitId::EX2:
            return example2_chain(Cx(need(p, "a")), Cx(need(p, "b")), Cx(need(p, "d")),
                                  c.spec.f.at(0), need_int(p, "r_int"), rel_tol);
    }
    throw Error("unknown unit-case id");
}

} // namespace hypid
