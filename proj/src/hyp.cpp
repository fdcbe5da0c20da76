#include "hypid/hyp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace hypid {

namespace {

std::atomic<long long> g_term_cap{1000000};

bool lex_less(const Cx& a, const Cx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

struct Termination {
    std::optional<long long> top_n;    // smallest top termination index
    std::optional<long long> bottom_m; // smallest bottom pole index
};

Termination scan(const HypSpec& spec) {
    Termination t;
    for (const Cx& a : spec.top)
        if (is_nonpositive_integer(a)) {
            long long n = -snap_integer(a);
            if (!t.top_n || n < *t.top_n) t.top_n = n;
        }
    for (const Cx& b : spec.bottom)
        if (is_nonpositive_integer(b)) {
            long long m = -snap_integer(b);
            if (!t.bottom_m || m < *t.bottom_m) t.bottom_m = m;
        }
    return t;
}

// The pole is only reached if the series runs past it; termination at or
// before the pole index keeps every evaluated denominator factor nonzero.
void check_bottom_poles(const Termination& t) {
    if (t.bottom_m && (!t.top_n || *t.top_n > *t.bottom_m))
        throw BottomPole("bottom parameter is a non-positive integer inside the summation range");
}

Cx step_factor(const HypSpec& spec, long long k) {
    Cx num(1.0, 0.0), den(1.0, 0.0);
    for (const Cx& a : spec.top) num *= a + static_cast<double>(k);
    for (const Cx& b : spec.bottom) den *= b + static_cast<double>(k);
    return num / den / static_cast<double>(k + 1);
}

// Exact summation of a terminating series: terms 0..N inclusive.
EvalReport sum_terminating(const HypSpec& spec, Cx x, long long N) {
    EvalReport rep;
    Cx t(1.0, 0.0), S(1.0, 0.0);
    rep.max_partial = 1.0;
    for (long long k = 0; k < N; ++k) {
        t *= step_factor(spec, k) * x;
        S += t;
        rep.max_partial = std::max(rep.max_partial, std::abs(S));
    }
    rep.value = S;
    rep.terms_used = N + 1;
    rep.tail_bound = 0.0;
    rep.converged = true;
    return rep;
}

// Non-terminating summation with a geometric tail majorant; valid whenever
// the late ratio bound |x| (k+2)^e (1 + slack/(k+1)) eventually drops below
// 1, i.e. |x| < 1 for e = 0 or any |x| (including 1) for e < 0.
EvalReport sum_with_majorant(const HypSpec& spec, Cx x, double rel_tol) {
    const int e = spec.p() - spec.q() - 1;
    EvalReport rep;
    Cx term(1.0, 0.0), S(1.0, 0.0);
    rep.max_partial = 1.0;
    double abs_sum_top = 0.0, abs_sum_bot = 0.0;
    for (const Cx& a : spec.top) abs_sum_top += std::abs(a);
    for (const Cx& b : spec.bottom) abs_sum_bot += std::abs(b);
    const double ratio_slack = abs_sum_top + 2.0 * abs_sum_bot;
    const long long k_min =
        std::max<long long>(16, static_cast<long long>(std::ceil(2.0 * abs_sum_bot)));
    const long long cap = term_cap();
    int hits = 0;

    for (long long k = 0;; ++k) {
        if (k + 1 >= cap) {
            rep.value = S;
            rep.terms_used = k + 1;
            rep.tail_bound = std::abs(term); // best information available
            rep.converged = false;
            return rep;
        }
        term *= step_factor(spec, k) * x;
        S += term;
        rep.max_partial = std::max(rep.max_partial, std::abs(S));
        if (k + 1 < k_min) continue;
        double rho = std::abs(x) * std::pow(static_cast<double>(k + 2), e) *
                     (1.0 + ratio_slack / static_cast<double>(k + 1));
        if (rho >= 1.0) {
            hits = 0;
            continue;
        }
        double tail = std::abs(term) * rho / (1.0 - rho);
        if (tail <= rel_tol * std::max(1.0, std::abs(S))) {
            if (++hits >= 3) {
                rep.value = S;
                rep.terms_used = k + 2;
                rep.tail_bound = tail;
                rep.converged = true;
                return rep;
            }
        } else {
            hits = 0;
        }
    }
}

} // namespace

HypSpec::HypSpec(ParamVec t, ParamVec b) : top(std::move(t)), bottom(std::move(b)) {
    std::sort(top.begin(), top.end(), lex_less);
    std::sort(bottom.begin(), bottom.end(), lex_less);
    for (const Cx& v : top)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error("HypSpec: non-finite top parameter");
    for (const Cx& v : bottom)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error("HypSpec: non-finite bottom parameter");
}

std::optional<long long> HypSpec::terminating_index() const {
    return scan(*this).top_n;
}

Cx HypSpec::excess() const {
    Cx s(0.0, 0.0);
    for (const Cx& b : bottom) s += b;
    for (const Cx& a : top) s -= a;
    return s;
}

long long term_cap() { return g_term_cap.load(); }

void set_term_cap(long long cap) {
    if (cap < 1) throw Error("set_term_cap: cap must be positive");
    g_term_cap.store(cap);
}

EvalReport eval_series(const HypSpec& spec, Cx x, double rel_tol) {
    Termination t = scan(spec);
    check_bottom_poles(t);

    if (t.top_n) {
        if (*t.top_n > term_cap())
            throw NonConvergent("terminating index exceeds the term cap");
        return sum_terminating(spec, x, *t.top_n);
    }

    const int e = spec.p() - spec.q() - 1;
    if (e > 0 && std::abs(x) > 0.0)
        throw NonConvergent("p > q+1 diverges for nonzero argument unless terminating");
    if (e == 0) {
        // Finite radius of convergence: the cut [1, inf) is rejected (no
        // analytic continuation); exactly x = 1 is the unit-argument case.
        if (x == Cx(1.0, 0.0)) return eval_unit(spec, rel_tol);
        if (x.imag() == 0.0 && x.real() >= 1.0)
            throw NonConvergent("x on [1, inf) rejected for p = q+1");
        if (std::abs(x) >= 1.0 - 1e-12)
            throw NonConvergent("|x| >= 1 outside the convergence disc for p = q+1");
    }

    return sum_with_majorant(spec, x, rel_tol);
}

EvalReport eval_unit(const HypSpec& spec, double rel_tol) {
    Termination t = scan(spec);
    check_bottom_poles(t);

    if (t.top_n) {
        if (*t.top_n > term_cap())
            throw NonConvergent("terminating index exceeds the term cap");
        return sum_terminating(spec, Cx(1.0, 0.0), *t.top_n);
    }

    const int e = spec.p() - spec.q() - 1;
    if (e > 0) throw NonConvergent("p > q+1 diverges at unit argument unless terminating");
    if (e < 0) return sum_with_majorant(spec, Cx(1.0, 0.0), rel_tol);

    // p = q+1 proper: algebraic decay t_k ~ C k^{-s-1}.
    const double s = spec.excess().real();
    if (s <= 0.0)
        throw NonConvergent("unit-argument series requires Re(excess) > 0 or termination");

    EvalReport rep;
    Cx term(1.0, 0.0), S(1.0, 0.0);
    rep.max_partial = 1.0;
    double abs_sum = 0.0;
    for (const Cx& a : spec.top) abs_sum += std::abs(a);
    for (const Cx& b : spec.bottom) abs_sum += std::abs(b);
    // Floor before trusting the asymptotic tail model: the k^{-s-1} regime
    // needs k to dominate every parameter.
    const long long k_min =
        std::max<long long>(30, static_cast<long long>(std::ceil(3.0 * abs_sum)));
    const long long cap = term_cap();
    int hits = 0;
    double tail = 0.0;

    for (long long k = 0;; ++k) {
        if (k + 1 >= cap) {
            rep.value = S;
            rep.terms_used = k + 1;
            rep.tail_bound = tail > 0.0 ? tail : std::abs(term);
            rep.converged = false;
            return rep;
        }
        term *= step_factor(spec, k);
        S += term;
        rep.max_partial = std::max(rep.max_partial, std::abs(S));
        if (k + 1 < k_min) continue;
        // Integral comparison: sum_{j>k} j^{-s-1} ~ k^{-s}/s, i.e. |t_k| k/s,
        // padded 1.5x against the still-drifting constant.
        tail = 1.5 * std::abs(term) * static_cast<double>(k + 1) / s;
        if (tail <= rel_tol * std::max(1.0, std::abs(S))) {
            if (++hits >= 3) {
                rep.value = S;
                rep.terms_used = k + 2;
                rep.tail_bound = tail;
                rep.converged = true;
                return rep;
            }
        } else {
            hits = 0;
        }
    }
}

EvalReport eval_ipd_lhs(std::optional<Cx> a, Cx b, Cx c, const IpdSpec& spec, Cx x,
                        double rel_tol) {
    ParamVec top;
    if (a) top.push_back(*a);
    top.push_back(b);
    for (const Cx& fm : spec.f_plus_m()) top.push_back(fm);
    ParamVec bottom{c};
    for (const Cx& f : spec.f) bottom.push_back(f);
    HypSpec h(std::move(top), std::move(bottom));
    return eval_series(h, x, rel_tol); // x = 1 delegates internally

}

} // namespace hypid
