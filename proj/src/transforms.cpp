#include "hypid/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "hypid/charpoly.hpp"

namespace hypid {
namespace {

// Internal cross-check tolerances. Violations are bug traps (Error), not
// input errors: the dual forms are mathematically identical.
constexpr double kCoefCrossTol = 1e-10;
constexpr double kRootCrossTol = 1e-9;
// Largest |x| accepted by the exponential-type identities; beyond this the
// e^x prefactor against an alternating series loses too many digits.
constexpr double kKummerArgMax = 20.0;

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

Residual finish(Cx lhs, Cx rhs, const EvalReport& lhs_rep, const EvalReport& rhs_rep,
                std::vector<std::string> flags = {}) {
    return make_residual(lhs, rhs, lhs_rep, rhs_rep, std::move(flags));
}

void append_shifted(ParamVec& dst, const ParamVec& src, Cx delta) {
    for (const Cx& z : src) dst.push_back(z + delta);
}

Cx shifted_product(const ParamVec& v, Cx delta) {
    Cx p = 1.0;
    for (const Cx& z : v) p *= z + delta;
    return p;
}

// (z)_n must not vanish: z within snap tolerance of {0,-1,...,-(n-1)} is the
// degenerate-normalizer regime handled by the limit identities instead.
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
// reduced polynomial changes shape and the degenerate identity does not
// apply as written.
void require_f_window_clear(Cx base, const IpdSpec& spec, int q, const char* label) {
    const int m = spec.m_total();
    for (int j = 0; j < spec.r(); ++j) {
        for (int t = m - q - spec.m[j]; t <= 0; ++t)
            if (std::abs(spec.f[static_cast<size_t>(j)] - base - from_int(t)) <= kIntSnapTol)
                throw ConstraintViolation(std::string(label) +
                                          ": an f_j - shift difference hits the excluded integer window");
    }
}

// a - b must avoid {q+1-m,...,q}: there the second-kind reduced polynomial
// is not defined.
void require_ab_clear(Cx a, Cx b, int q, int m) {
    for (int t = q + 1 - m; t <= q; ++t)
        if (std::abs(a - b - from_int(t)) <= kIntSnapTol)
            throw ConstraintViolation("a-b hits the excluded integer window");
}

void require_inside_unit_disc(Cx x) {
    if (std::abs(x) >= 1.0 - 1e-12)
        throw ConstraintViolation("|x| must be < 1");
}

// Identities whose right side runs in y = x/(x-1) need both arguments
// inside the unit disc (|y| < 1 is not implied by |x| < 1: it fails for
// Re x >= 1/2).
void require_joint_disc(Cx x) {
    require_inside_unit_disc(x);
    if (std::abs(x / (x - 1.0)) >= 1.0 - 1e-12)
        throw ConstraintViolation("|x/(x-1)| must be < 1");
}

void require_kummer_arg(Cx x) {
    if (std::abs(x) > kKummerArgMax)
        throw ConstraintViolation("|x| exceeds the supported range for the exponential identities");
}

Cx need(const std::optional<Cx>& a, const char* who) {
    if (!a) throw Error(std::string(who) + " requires parameter a");
    return *a;
}

// Tail factor of the first-kind degenerate identities:
//   arg^{q+1} (a)_{q+1}-style weight * R(-q-1) / ((c)_{q+1} (m-q-1)!),
// with the series 1F-style in the reduced roots. Shared by thm1/thm2.
struct DegenerateTail {
    Cx value = 0.0;               // coefficient * series
    EvalReport report;            // series report (exact zero when absent)
    bool zero_poly = false;
};

DegenerateTail first_kind_tail(Cx b, const IpdSpec& spec, int q, Cx arg, Cx weight,
                               double rel_tol, bool with_extra_top, Cx extra_top) {
    const int m = spec.m_total();
    DegenerateTail tail;
    const CPoly red = r_poly(b, spec, q);
    if (red.is_zero()) {
        tail.zero_poly = true;
        tail.report = exact_report(0.0);
        return tail;
    }
    const RootSet lam = roots(red);
    const Cx coef = pow_int(arg, q + 1) * weight * r_at(b, spec, q) /
                    (pochhammer(b + from_int(m - q), q + 1) * fact(m - q - 1));
    ParamVec top{Cx(1.0, 0.0)};
    if (with_extra_top) top.push_back(extra_top);
    append_shifted(top, lam.roots, from_int(q + 2));
    ParamVec bot{b + from_int(m + 1)};
    append_shifted(bot, lam.roots, from_int(q + 1));
    tail.report = eval_series(HypSpec(std::move(top), std::move(bot)), arg, rel_tol);
    tail.value = coef * tail.report.value;
    return tail;
}

} // namespace

Residual make_residual(Cx lhs, Cx rhs, const EvalReport& lhs_report,
                       const EvalReport& rhs_report, std::vector<std::string> flags) {
    Residual res;
    res.lhs = lhs;
    res.rhs = rhs;
    res.abs_err = std::abs(lhs - rhs);
    res.rel_err = res.abs_err / std::max({std::abs(lhs), std::abs(rhs), 1.0});
    res.lhs_report = lhs_report;
    res.rhs_report = rhs_report;
    res.flags = std::move(flags);
    return res;
}

const char* identity_name(IdentityId id) {
    switch (id) {
        case IdentityId::MP1: return "MP1";
        case IdentityId::MP2: return "MP2";
        case IdentityId::MP3: return "MP3";
        case IdentityId::THM1: return "THM1";
        case IdentityId::THM2: return "THM2";
        case IdentityId::THM3: return "THM3";
        case IdentityId::COR1A: return "COR1a";
        case IdentityId::COR1B: return "COR1b";
        case IdentityId::COR2: return "COR2";
        case IdentityId::COR2ALT: return "COR2alt";
        case IdentityId::COR3A: return "COR3a";
        case IdentityId::COR3B: return "COR3b";
        case IdentityId::COR4: return "COR4";
        case IdentityId::COR5A: return "COR5a";
        case IdentityId::COR5B: return "COR5b";
        case IdentityId::COR6: return "COR6";
        case IdentityId::INTRO_A: return "INTRO_A";
        case IdentityId::INTRO_B: return "INTRO_B";
        case IdentityId::LIMIT_M1: return "LIMIT_M1";
    }
    throw Error("unknown identity id");
}

IdentityId identity_from_name(std::string_view name) {
    std::string low(name);
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    static const std::pair<const char*, IdentityId> table[] = {
        {"mp1", IdentityId::MP1},         {"mp2", IdentityId::MP2},
        {"mp3", IdentityId::MP3},         {"thm1", IdentityId::THM1},
        {"thm2", IdentityId::THM2},       {"thm3", IdentityId::THM3},
        {"cor1a", IdentityId::COR1A},     {"cor1b", IdentityId::COR1B},
        {"cor2", IdentityId::COR2},       {"cor2alt", IdentityId::COR2ALT},
        {"cor3a", IdentityId::COR3A},     {"cor3b", IdentityId::COR3B},
        {"cor4", IdentityId::COR4},       {"cor5a", IdentityId::COR5A},
        {"cor5b", IdentityId::COR5B},     {"cor6", IdentityId::COR6},
        {"intro_a", IdentityId::INTRO_A}, {"intro_b", IdentityId::INTRO_B},
        {"limit_m1", IdentityId::LIMIT_M1},
    };
    for (const auto& [key, id] : table)
        if (low == key) return id;
    throw ParseError("unknown identity name: " + std::string(name));
}

Residual mp_first(Cx a, Cx b, Cx c, const IpdSpec& spec, Cx x, double rel_tol) {
    const int m = spec.m_total();
    require_joint_disc(x);
    require_poch_nonzero(c - b - from_int(m), m, "(c-b-m)_m");
    const Cx y = x / (x - 1.0);

    const EvalReport lhs_rep = eval_ipd_lhs(a, b, c, spec, x, rel_tol);

    const RootSet zeta = roots(qm_poly(b, c, spec));
    ParamVec top{a, c - b - from_int(m)};
    append_shifted(top, zeta.roots, 1.0);
    ParamVec bot{c};
    append_shifted(bot, zeta.roots, 0.0);
    const EvalReport rhs_rep = eval_series(HypSpec(std::move(top), std::move(bot)), y, rel_tol);

    const Cx pref = std::pow(1.0 - x, -a);
    return finish(lhs_rep.value, pref * rhs_rep.value, lhs_rep, rhs_rep);
}

Residual mp_kummer(Cx b, Cx c, const IpdSpec& spec, Cx x, double rel_tol) {
    const int m = spec.m_total();
    require_kummer_arg(x);
    require_poch_nonzero(c - b - from_int(m), m, "(c-b-m)_m");

    const EvalReport lhs_rep = eval_ipd_lhs(std::nullopt, b, c, spec, x, rel_tol);

    const RootSet zeta = roots(qm_poly(b, c, spec));
    ParamVec top{c - b - from_int(m)};
    append_shifted(top, zeta.roots, 1.0);
    ParamVec bot{c};
    append_shifted(bot, zeta.roots, 0.0);
    const EvalReport rhs_rep = eval_series(HypSpec(std::move(top), std::move(bot)), -x, rel_tol);

    return finish(lhs_rep.value, std::exp(x) * rhs_rep.value, lhs_rep, rhs_rep);
}

Residual mp_second(Cx a, Cx b, Cx c, const IpdSpec& spec, Cx x, double rel_tol) {
    const int m = spec.m_total();
    require_inside_unit_disc(x);
    require_poch_nonzero(c - a - from_int(m), m, "(c-a-m)_m");
    require_poch_nonzero(c - b - from_int(m), m, "(c-b-m)_m");
    require_poch_nonzero(Cx(1.0, 0.0) + a + b - c, m, "(1+a+b-c)_m");

    const EvalReport lhs_rep = eval_ipd_lhs(a, b, c, spec, x, rel_tol);

    const RootSet eta = roots(qmhat_poly(a, b, c, spec));
    ParamVec top{c - a - from_int(m), c - b - from_int(m)};
    append_shifted(top, eta.roots, 1.0);
    ParamVec bot{c};
    append_shifted(bot, eta.roots, 0.0);
    const EvalReport rhs_rep = eval_series(HypSpec(std::move(top), std::move(bot)), x, rel_tol);

    const Cx pref = std::pow(1.0 - x, c - a - b - from_int(m));
    return finish(lhs_rep.value, pref * rhs_rep.value, lhs_rep, rhs_rep);
}

Residual thm1_degenerate(Cx a, Cx b, const IpdSpec& spec, int q, Cx x, double rel_tol) {
    const int m = spec.m_total();
    require_q_range(q, m);
    const Cx c = b + from_int(m - q);
    require_not_nonpos_int(c, "b+m-q");
    require_f_window_clear(b, spec, q, "first-kind degenerate identity");
    require_joint_disc(x);
    const Cx y = x / (x - 1.0);

    const EvalReport lhs_rep = eval_ipd_lhs(a, b, c, spec, x, rel_tol);
    const Cx lhs = std::pow(1.0 - x, a) * lhs_rep.value;

    Cx head = 0.0;
    for (int j = 0; j <= q; ++j)
        head += pochhammer(a, j) * pochhammer(from_int(-q), j) * q0_value(b, spec, q, j) /
                (pochhammer(c, j) * fact(j)) * pow_int(y, j);

    DegenerateTail tail =
        first_kind_tail(b, spec, q, y, pochhammer(a, q + 1), rel_tol, true, a + from_int(q + 1));
    std::vector<std::string> flags;
    if (tail.zero_poly) flags.emplace_back("ZeroReducedPolynomial");
    return finish(lhs, head + tail.value, lhs_rep, tail.report, std::move(flags));
}

Residual thm2_degenerate_kummer(Cx b, const IpdSpec& spec, int q, Cx x, double rel_tol) {
    const int m = spec.m_total();
    require_q_range(q, m);
    const Cx c = b + from_int(m - q);
    require_not_nonpos_int(c, "b+m-q");
    require_f_window_clear(b, spec, q, "exponential degenerate identity");
    require_kummer_arg(x);

    const EvalReport lhs_rep = eval_ipd_lhs(std::nullopt, b, c, spec, x, rel_tol);
    const Cx lhs = std::exp(-x) * lhs_rep.value;

    Cx head = 0.0;
    for (int j = 0; j <= q; ++j)
        head += pochhammer(from_int(-q), j) * q0_value(b, spec, q, j) /
                (pochhammer(c, j) * fact(j)) * pow_int(-x, j);

    DegenerateTail tail = first_kind_tail(b, spec, q, -x, 1.0, rel_tol, false, 0.0);
    std::vector<std::string> flags;
    if (tail.zero_poly) flags.emplace_back("ZeroReducedPolynomial");
    return finish(lhs, head + tail.value, lhs_rep, tail.report, std::move(flags));
}

Residual thm3_degenerate(Cx a, Cx b, const IpdSpec& spec, int q, Cx x, double rel_tol) {
    const int m = spec.m_total();
    require_q_range(q, m);
    const Cx c = a + from_int(m - q);
    require_not_nonpos_int(c, "a+m-q");
    require_ab_clear(a, b, q, m);
    require_f_window_clear(a, spec, q, "second-kind degenerate identity");
    require_inside_unit_disc(x);

    const EvalReport lhs_rep = eval_ipd_lhs(a, b, c, spec, x, rel_tol);
    const Cx lhs = std::pow(1.0 - x, b + from_int(q)) * lhs_rep.value;

    Cx head = 0.0;
    for (int j = 0; j <= q; ++j)
        head += pochhammer(from_int(-q), j) * pochhammer(a - b - from_int(q), j) *
                qhat0_value(a, b, spec, q, j) / (pochhammer(c, j) * fact(j)) * pow_int(x, j);

    std::vector<std::string> flags;
    EvalReport tail_rep = exact_report(0.0);
    Cx tail_value = 0.0;
    const CPoly red = rhat_poly(a, b, spec, q);
    if (red.is_zero()) {
        flags.emplace_back("ZeroReducedPolynomial");
    } else {
        const RootSet gam = roots(red);
        const Cx coef = pow_int(x, q + 1) * rhat_at(a, b, spec, q) * pochhammer(b - a, q + 1) /
                        pochhammer(c, q + 1);
        ParamVec top{Cx(1.0, 0.0), a - b + 1.0};
        append_shifted(top, gam.roots, from_int(q + 2));
        ParamVec bot{a + from_int(m + 1)};
        append_shifted(bot, gam.roots, from_int(q + 1));
        tail_rep = eval_series(HypSpec(std::move(top), std::move(bot)), x, rel_tol);
        tail_value = coef * tail_rep.value;
    }
    return finish(lhs, head + tail_value, lhs_rep, tail_rep, std::move(flags));
}

Residual cor_q0(Variant v, std::optional<Cx> a, Cx b, const IpdSpec& spec, Cx x,
                double rel_tol) {
    const int m = spec.m_total();
    if (v == Variant::First || v == Variant::Kummer) {
        const Cx c = b + from_int(m);
        require_not_nonpos_int(c, "b+m");
        require_f_window_clear(b, spec, 0, "q=0 corollary");
        const CPoly red = r_poly(b, spec, 0);
        if (red.is_zero())
            throw IdenticallyZero("reduced polynomial vanished outside the excluded window");
        const RootSet lam = roots(red);
        const Cx big_b = pochhammer(b, m) / pochhammer_ipd(spec, 0.0);

        if (v == Variant::First) {
            const Cx aa = need(a, "cor_q0(First)");
            require_joint_disc(x);
            const Cx y = x / (x - 1.0);
            const EvalReport lhs_rep = eval_ipd_lhs(aa, b, c, spec, x, rel_tol);
            const Cx lhs = std::pow(1.0 - x, aa) * lhs_rep.value;
            ParamVec top{Cx(1.0, 0.0), aa};
            append_shifted(top, lam.roots, 1.0);
            ParamVec bot{c};
            append_shifted(bot, lam.roots, 0.0);
            const EvalReport rhs_rep =
                eval_series(HypSpec(std::move(top), std::move(bot)), y, rel_tol);
            return finish(lhs, big_b + (1.0 - big_b) * rhs_rep.value, lhs_rep, rhs_rep);
        }
        require_kummer_arg(x);
        const EvalReport lhs_rep = eval_ipd_lhs(std::nullopt, b, c, spec, x, rel_tol);
        const Cx lhs = std::exp(-x) * lhs_rep.value;
        ParamVec top{Cx(1.0, 0.0)};
        append_shifted(top, lam.roots, 1.0);
        ParamVec bot{c};
        append_shifted(bot, lam.roots, 0.0);
        const EvalReport rhs_rep = eval_series(HypSpec(std::move(top), std::move(bot)), -x, rel_tol);
        return finish(lhs, big_b + (1.0 - big_b) * rhs_rep.value, lhs_rep, rhs_rep);
    }

    const Cx aa = need(a, "cor_q0(Second)");
    const Cx c = aa + from_int(m);
    require_not_nonpos_int(c, "a+m");
    require_ab_clear(aa, b, 0, m);
    require_f_window_clear(aa, spec, 0, "q=0 corollary (second kind)");
    require_inside_unit_disc(x);

    const EvalReport lhs_rep = eval_ipd_lhs(aa, b, c, spec, x, rel_tol);
    const Cx lhs = std::pow(1.0 - x, b) * lhs_rep.value;

    const CPoly red = rhat_poly(aa, b, spec, 0);
    if (red.is_zero())
        throw IdenticallyZero("reduced polynomial vanished outside the excluded window");
    const RootSet gam = roots(red);

    if (v == Variant::Second) {
        const Cx ratio = aa * shifted_product(spec.f_plus_m(), 0.0) /
                         ((aa + from_int(m)) * shifted_product(spec.f, 0.0));
        const Cx coef = x * b * (ratio - 1.0);
        ParamVec top{Cx(1.0, 0.0), aa - b + 1.0};
        append_shifted(top, gam.roots, 2.0);
        ParamVec bot{c + 1.0};
        append_shifted(bot, gam.roots, 1.0);
        const EvalReport rhs_rep = eval_series(HypSpec(std::move(top), std::move(bot)), x, rel_tol);
        return finish(lhs, 1.0 + coef * rhs_rep.value, lhs_rep, rhs_rep);
    }

    // Explicit-constant rearrangement.
    Cx big_a = 0.0;
    for (int k = 0; k <= m; ++k)
        big_a += pow_int(-1.0, k) * ckr(k, spec) * pochhammer(aa, k) * pochhammer(b, k) *
                 pochhammer(1.0 - aa - from_int(m), m - k) /
                 (pochhammer(aa - b, k) * pochhammer(1.0 + b - aa - from_int(m), m - k));
    ParamVec top{Cx(1.0, 0.0), aa - b};
    append_shifted(top, gam.roots, 1.0);
    ParamVec bot{c};
    append_shifted(bot, gam.roots, 0.0);
    const EvalReport rhs_rep = eval_series(HypSpec(std::move(top), std::move(bot)), x, rel_tol);
    return finish(lhs, big_a + (1.0 - big_a) * rhs_rep.value, lhs_rep, rhs_rep);
}

Residual cor_qm1(Variant v, std::optional<Cx> a, Cx b, const IpdSpec& spec, Cx x,
                 double rel_tol) {
    const int m = spec.m_total();
    const int q = m - 1;
    if (v == Variant::SecondAlt) throw Error("cor_qm1 has no SecondAlt variant");

    if (v == Variant::First || v == Variant::Kummer) {
        const Cx c = b + 1.0;
        require_not_nonpos_int(c, "b+1");
        require_f_window_clear(b, spec, q, "q=m-1 corollary");

        // Partial sums of the alternating moment series; these are the limit
        // values up to the factor j!/(1-m)_j.
        std::vector<Cx> part(static_cast<size_t>(m), 0.0);
        Cx run = 0.0;
        for (int j = 0; j < m; ++j) {
            run += pow_int(-1.0, j) * pochhammer(b, j) * ckr(j, spec);
            part[static_cast<size_t>(j)] = run;
        }
        // Cross-check against the terminating-series form of the same
        // coefficients: (b+1)_j F(-j, b, f+m; b+1, f | 1) = j! * partial_j.
        for (int j = 0; j < m; ++j) {
            ParamVec t{from_int(-j), b};
            append_shifted(t, spec.f_plus_m(), 0.0);
            ParamVec bo{c};
            append_shifted(bo, spec.f, 0.0);
            const EvalReport u = eval_unit(HypSpec(std::move(t), std::move(bo)), rel_tol);
            const Cx lhs_form = pochhammer(c, j) * u.value;
            const Cx rhs_form = fact(j) * part[static_cast<size_t>(j)];
            if (std::abs(lhs_form - rhs_form) >
                kCoefCrossTol * std::max({std::abs(lhs_form), std::abs(rhs_form), 1.0}))
                throw Error("partial-sum and terminating coefficient forms disagree");
        }

        const Cx tail_const = pochhammer_ipd(spec, -b) / pochhammer_ipd(spec, 0.0);

        if (v == Variant::First) {
            const Cx aa = need(a, "cor_qm1(First)");
            require_joint_disc(x);
            const Cx y = x / (x - 1.0);
            const EvalReport lhs_rep = eval_ipd_lhs(aa, b, c, spec, x, rel_tol);
            const Cx lhs = std::pow(1.0 - x, aa) * lhs_rep.value;
            Cx head = 0.0;
            for (int j = 0; j < m; ++j)
                head += pochhammer(aa, j) * part[static_cast<size_t>(j)] / pochhammer(c, j) *
                        pow_int(y, j);
            const Cx coef =
                pow_int(y, m) * pochhammer(aa, m) * tail_const / pochhammer(c, m);
            const EvalReport tail_rep = eval_series(
                HypSpec({Cx(1.0, 0.0), aa + from_int(m)}, {b + from_int(m + 1)}), y, rel_tol);
            return finish(lhs, head + coef * tail_rep.value, lhs_rep, tail_rep);
        }
        require_kummer_arg(x);
        const EvalReport lhs_rep = eval_ipd_lhs(std::nullopt, b, c, spec, x, rel_tol);
        const Cx lhs = std::exp(-x) * lhs_rep.value;
        Cx head = 0.0;
        for (int j = 0; j < m; ++j)
            head += part[static_cast<size_t>(j)] / pochhammer(c, j) * pow_int(-x, j);
        const Cx coef = pow_int(-x, m) * tail_const / pochhammer(c, m);
        const EvalReport tail_rep =
            eval_series(HypSpec({Cx(1.0, 0.0)}, {b + from_int(m + 1)}), -x, rel_tol);
        return finish(lhs, head + coef * tail_rep.value, lhs_rep, tail_rep);
    }

    const Cx aa = need(a, "cor_qm1(Second)");
    const Cx c = aa + 1.0;
    require_not_nonpos_int(c, "a+1");
    require_ab_clear(aa, b, q, m);
    require_f_window_clear(aa, spec, q, "q=m-1 corollary (second kind)");
    require_inside_unit_disc(x);

    const EvalReport lhs_rep = eval_ipd_lhs(aa, b, c, spec, x, rel_tol);
    const Cx lhs = std::pow(1.0 - x, b + from_int(m - 1)) * lhs_rep.value;

    Cx head = 0.0;
    for (int j = 0; j < m; ++j)
        head += pochhammer(from_int(1 - m), j) * pochhammer(aa - b - from_int(m - 1), j) *
                qhat0_value(aa, b, spec, q, j) / (pochhammer(c, j) * fact(j)) * pow_int(x, j);

    const Cx coef = pow_int(x, m) * pow_int(-1.0, m) * pochhammer(b, m) *
                    pochhammer_ipd(spec, -aa) / (pochhammer(c, m) * pochhammer_ipd(spec, 0.0));
    const EvalReport tail_rep = eval_series(
        HypSpec({Cx(1.0, 0.0), aa - b + 1.0}, {aa + from_int(m + 1)}), x, rel_tol);
    return finish(lhs, head + coef * tail_rep.value, lhs_rep, tail_rep);
}

Residual cor_qm2(Variant v, std::optional<Cx> a, Cx b, const IpdSpec& spec, Cx x,
                 double rel_tol) {
    const int m = spec.m_total();
    if (m < 2) throw ConstraintViolation("q=m-2 corollaries need m_total >= 2");
    const int q = m - 2;
    if (v == Variant::SecondAlt) throw Error("cor_qm2 has no SecondAlt variant");

    if (v == Variant::First || v == Variant::Kummer) {
        const Cx c = b + 2.0;
        require_not_nonpos_int(c, "b+2");
        require_f_window_clear(b, spec, q, "q=m-2 corollary");

        // Closed-form reduced root; the polynomial root must agree.
        const Cx denom = shifted_product(spec.f_plus_m(), -b - 1.0);
        if (std::abs(denom) <= kIntSnapTol)
            throw DegenerateNormalizer("closed-form root denominator vanishes");
        const Cx lambda = 1.0 + b - b * shifted_product(spec.f, -b - 1.0) / denom;
        const CPoly red = r_poly(b, spec, q);
        if (red.degree() != 1)
            throw DegenerateNormalizer("reduced polynomial does not have a single root");
        const Cx rt = roots(red).roots.front();
        if (std::abs(lambda - rt) > kRootCrossTol * std::max(1.0, std::abs(lambda)))
            throw Error("closed-form reduced root disagrees with the polynomial root");

        std::vector<Cx> weighted(static_cast<size_t>(m - 1), 0.0);
        for (int j = 0; j <= m - 2; ++j) {
            Cx sum = 0.0;
            for (int k = 0; k <= j; ++k)
                sum += pow_int(-1.0, k) * pochhammer(b, k) * ckr(k, spec) * from_int(j - k + 1);
            weighted[static_cast<size_t>(j)] = sum;
        }
        const Cx bracket = (b + from_int(m)) * pochhammer_ipd(spec, -b) -
                           b * pochhammer_ipd(spec, -b - 1.0);
        const Cx tail_const = bracket / pochhammer_ipd(spec, 0.0);

        if (v == Variant::First) {
            const Cx aa = need(a, "cor_qm2(First)");
            require_joint_disc(x);
            const Cx y = x / (x - 1.0);
            const EvalReport lhs_rep = eval_ipd_lhs(aa, b, c, spec, x, rel_tol);
            const Cx lhs = std::pow(1.0 - x, aa) * lhs_rep.value;
            Cx head = 0.0;
            for (int j = 0; j <= m - 2; ++j)
                head += pochhammer(aa, j) * weighted[static_cast<size_t>(j)] /
                        pochhammer(c, j) * pow_int(y, j);
            const Cx coef =
                pow_int(y, m - 1) * pochhammer(aa, m - 1) * tail_const / pochhammer(c, m - 1);
            const EvalReport tail_rep = eval_series(
                HypSpec({Cx(1.0, 0.0), aa + from_int(m - 1), lambda + from_int(m)},
                        {b + from_int(m + 1), lambda + from_int(m - 1)}),
                y, rel_tol);
            return finish(lhs, head + coef * tail_rep.value, lhs_rep, tail_rep);
        }
        require_kummer_arg(x);
        const EvalReport lhs_rep = eval_ipd_lhs(std::nullopt, b, c, spec, x, rel_tol);
        const Cx lhs = std::exp(-x) * lhs_rep.value;
        Cx head = 0.0;
        for (int j = 0; j <= m - 2; ++j)
            head += weighted[static_cast<size_t>(j)] / pochhammer(c, j) * pow_int(-x, j);
        const Cx coef = pow_int(-x, m - 1) * tail_const / pochhammer(c, m - 1);
        const EvalReport tail_rep = eval_series(
            HypSpec({Cx(1.0, 0.0), lambda + from_int(m)},
                    {b + from_int(m + 1), lambda + from_int(m - 1)}),
            -x, rel_tol);
        return finish(lhs, head + coef * tail_rep.value, lhs_rep, tail_rep);
    }

    const Cx aa = need(a, "cor_qm2(Second)");
    const Cx c = aa + 2.0;
    require_not_nonpos_int(c, "a+2");
    require_ab_clear(aa, b, q, m);
    require_f_window_clear(aa, spec, q, "q=m-2 corollary (second kind)");
    require_inside_unit_disc(x);

    const Cx p1 = shifted_product(spec.f, -aa - 1.0);
    const Cx p2 = shifted_product(spec.f_plus_m(), -aa - 1.0);
    const Cx gdenom = aa * p1 / (aa - b + 1.0) - p2;
    if (std::abs(gdenom) <= kIntSnapTol)
        throw DegenerateNormalizer("closed-form root denominator vanishes");
    const Cx gamma = from_int(1 - m) + (aa * p1 - (aa + from_int(m)) * p2) / gdenom;
    const CPoly red = rhat_poly(aa, b, spec, q);
    if (red.degree() != 1)
        throw DegenerateNormalizer("reduced polynomial does not have a single root");
    const Cx rt = roots(red).roots.front();
    if (std::abs(gamma - rt) > kRootCrossTol * std::max(1.0, std::abs(gamma)))
        throw Error("closed-form reduced root disagrees with the polynomial root");

    const EvalReport lhs_rep = eval_ipd_lhs(aa, b, c, spec, x, rel_tol);
    const Cx lhs = std::pow(1.0 - x, b + from_int(m - 2)) * lhs_rep.value;

    Cx head = 0.0;
    for (int j = 0; j <= m - 2; ++j)
        head += pochhammer(from_int(2 - m), j) * pochhammer(aa - b - from_int(m - 2), j) *
                qhat0_value(aa, b, spec, q, j) / (pochhammer(c, j) * fact(j)) * pow_int(x, j);

    const Cx bracket = (aa + from_int(m)) * pochhammer_ipd(spec, -aa) -
                       aa * pochhammer_ipd(spec, -aa - 1.0);
    const Cx coef = pow_int(x, m - 1) * pow_int(-1.0, m - 1) * pochhammer(b, m - 1) * bracket /
                    (pochhammer(c, m - 1) * pochhammer_ipd(spec, 0.0));
    const EvalReport tail_rep = eval_series(
        HypSpec({Cx(1.0, 0.0), aa - b + 1.0, gamma + from_int(m)},
                {aa + from_int(m + 1), gamma + from_int(m - 1)}),
        x, rel_tol);
    return finish(lhs, head + coef * tail_rep.value, lhs_rep, tail_rep);
}

Residual intro_identities(Variant which, Cx a, Cx b, Cx f, Cx x, double rel_tol) {
    if (which != Variant::First && which != Variant::Second)
        throw Error("intro_identities takes Variant::First or Variant::Second");
    const IpdSpec spec({f}, {1});
    require_not_nonpos_int(a + 1.0, "a+1");

    const EvalReport lhs_rep = eval_ipd_lhs(a, b, a + 1.0, spec, x, rel_tol);
    const Cx lhs = std::pow(1.0 - x, b) * lhs_rep.value;

    if (which == Variant::First) {
        require_inside_unit_disc(x);
        if (std::abs(a - b) <= kIntSnapTol)
            throw ConstraintViolation("a-b must be nonzero");
        const Cx coef = b * (a - f) / (f * (a - b));
        const EvalReport rhs_rep = eval_series(HypSpec({Cx(1.0, 0.0), a - b}, {a + 1.0}), x, rel_tol);
        return finish(lhs, 1.0 - coef + coef * rhs_rep.value, lhs_rep, rhs_rep);
    }

    require_joint_disc(x);
    if (std::abs(f - a) <= kIntSnapTol)
        throw ConstraintViolation("f must differ from a");
    const Cx y = x / (x - 1.0);
    const Cx coef = (f - a) / f;
    const EvalReport rhs_rep = eval_series(HypSpec({Cx(1.0, 0.0), b}, {a + 1.0}), y, rel_tol);
    return finish(lhs, 1.0 - coef + coef * rhs_rep.value, lhs_rep, rhs_rep);
}

Residual limit_m1(const ParamVec& top, const ParamVec& bottom, Cx alpha, Cx x, double eps,
                  double rel_tol) {
    if (top.empty() || bottom.size() + 1 != top.size())
        throw ConstraintViolation("limit_m1 needs p top and p-1 bottom parameters");
    if (std::abs(alpha) <= kIntSnapTol)
        throw ConstraintViolation("alpha must be nonzero");
    if (eps <= 0.0) throw ConstraintViolation("eps must be positive");

    ParamVec t{Cx(eps, 0.0)};
    append_shifted(t, top, 0.0);
    ParamVec bo{alpha * eps};
    append_shifted(bo, bottom, 0.0);
    const EvalReport lhs_rep = eval_series(HypSpec(std::move(t), std::move(bo)), x, rel_tol);

    const EvalReport rhs_rep = eval_series(HypSpec(top, bottom), x, rel_tol);
    const Cx rhs = 1.0 - 1.0 / alpha + rhs_rep.value / alpha;
    return finish(lhs_rep.value, rhs, lhs_rep, rhs_rep);
}

} // namespace hypid
