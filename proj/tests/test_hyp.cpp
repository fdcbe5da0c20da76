#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hypid/hyp.hpp"
#include "hypid/rng.hpp"

using namespace hypid;

namespace {
double rel_diff(Cx a, Cx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); }

Cx gauss_2f1(Cx a, Cx b, Cx c, Cx x, double tol = 1e-12) {
    return eval_series(HypSpec({a, b}, {c}), x, tol).value;
}
} // namespace

TEST_CASE("eval_series: 1F0 closed form (1-x)^{-a}") {
    auto rep = eval_series(HypSpec({Cx(1.5, 0)}, {}), Cx(0.25, 0), 1e-12);
    CHECK(rep.converged);
    CHECK(rel_diff(rep.value, std::pow(Cx(0.75, 0), Cx(-1.5, 0))) < 1e-10);
}

TEST_CASE("eval_series: terminating 2F1 explicit 3-term polynomial") {
    double b = 1.1, c = 2.3, x = 0.7;
    auto rep = eval_series(HypSpec({Cx(-2, 0), Cx(b, 0)}, {Cx(c, 0)}), Cx(x, 0), 1e-12);
    CHECK(rep.converged);
    CHECK(rep.terms_used == 3);
    CHECK(rep.tail_bound == 0.0);
    double expected = 1.0 - 2.0 * (b / c) * x + ((2.0) * (b * (b + 1)) / ((c * (c + 1)) * 2.0)) * x * x;
    CHECK(rel_diff(rep.value, Cx(expected, 0)) < 1e-14);
}

TEST_CASE("eval_series: x=0 gives 1 for any spec") {
    auto rep = eval_series(HypSpec({Cx(2.2, 1.0), Cx(-0.7, 0)}, {Cx(3.3, 0)}), Cx(0, 0), 1e-12);
    CHECK(rep.value == Cx(1.0, 0.0));
    CHECK(rep.converged);
}

TEST_CASE("eval_series: termination wins over |x| and runs exactly N+1 terms") {
    auto rep = eval_series(HypSpec({Cx(-3, 0), Cx(2, 0)}, {Cx(1.5, 0)}), Cx(5.0, 0), 1e-12);
    CHECK(rep.converged);
    CHECK(rep.terms_used == 4);
    // direct polynomial
    Cx s(0, 0), t(1, 0);
    for (int k = 0; k <= 3; ++k) {
        if (k > 0) t *= (Cx(-3, 0) + (k - 1.0)) * (Cx(2, 0) + (k - 1.0)) /
                        ((Cx(1.5, 0) + (k - 1.0)) * static_cast<double>(k)) * 5.0;
        s += t;
    }
    CHECK(rel_diff(rep.value, s) < 1e-14);
}

TEST_CASE("eval_series: permutation of parameters is bit-identical") {
    ParamVec top{Cx(0.5, 0.2), Cx(1.7, 0), Cx(-0.3, -0.1)};
    ParamVec bot{Cx(2.0, 0), Cx(1.25, 0.5)};
    Cx x(0.35, 0.1);
    auto a = eval_series(HypSpec(top, bot), x, 1e-12);
    std::swap(top[0], top[2]);
    std::swap(bot[0], bot[1]);
    auto b = eval_series(HypSpec(top, bot), x, 1e-12);
    CHECK(a.value.real() == b.value.real());
    CHECK(a.value.imag() == b.value.imag());
    CHECK(a.terms_used == b.terms_used);
}

TEST_CASE("eval_series: rejection and pole errors") {
    HypSpec gauss({Cx(0.5, 0), Cx(0.7, 0)}, {Cx(2.0, 0)});
    // Exactly x = 1 with positive excess delegates to the unit evaluator.
    auto unit = eval_series(HypSpec({Cx(0.3, 0), Cx(0.4, 0)}, {Cx(2.0, 0)}), Cx(1.0, 0), 1e-6);
    CHECK(unit.converged);
    CHECK(rel_diff(unit.value,
                   gamma_ratio({Cx(2.0, 0), Cx(1.3, 0)}, {Cx(1.7, 0), Cx(1.6, 0)})) < 1e-5);
    // Negative excess at x = 1 cannot converge.
    CHECK_THROWS_AS(
        eval_series(HypSpec({Cx(1.5, 0), Cx(1.2, 0)}, {Cx(2.0, 0)}), Cx(1.0, 0), 1e-10),
        NonConvergent);
    CHECK_THROWS_AS(eval_series(gauss, Cx(3.7, 0), 1e-10), NonConvergent);
    CHECK_THROWS_AS(eval_series(gauss, Cx(0.8, 0.7), 1e-10), NonConvergent); // |x|>1
    // 3F1 diverges for any nonzero x unless terminating.
    CHECK_THROWS_AS(
        eval_series(HypSpec({Cx(0.5, 0), Cx(0.7, 0), Cx(1.1, 0)}, {Cx(2.0, 0)}), Cx(0.1, 0), 1e-10),
        NonConvergent);
    // Bottom pole before termination.
    CHECK_THROWS_AS(eval_series(HypSpec({Cx(0.5, 0), Cx(0.7, 0)}, {Cx(-2.0, 0)}), Cx(0.1, 0), 1e-10),
                    BottomPole);
    CHECK_THROWS_AS(eval_series(HypSpec({Cx(-5, 0), Cx(0.7, 0)}, {Cx(-2.0, 0)}), Cx(0.1, 0), 1e-10),
                    BottomPole);
    // Termination at or before the pole index is legal.
    CHECK_NOTHROW(eval_series(HypSpec({Cx(-2, 0), Cx(0.7, 0)}, {Cx(-2.0, 0)}), Cx(0.1, 0), 1e-10));
    CHECK_NOTHROW(eval_series(HypSpec({Cx(-1, 0), Cx(0.7, 0)}, {Cx(-2.0, 0)}), Cx(0.1, 0), 1e-10));
}

TEST_CASE("eval_series: EvalReport invariant on tail_bound") {
    auto rep = eval_series(HypSpec({Cx(0.5, 0), Cx(0.7, 0)}, {Cx(2.0, 0)}), Cx(0.82, 0), 1e-9);
    CHECK(rep.converged);
    CHECK(rep.tail_bound <= 1e-9 * std::max(1.0, std::abs(rep.value)));
    CHECK(rep.max_partial >= std::abs(rep.value));
}

TEST_CASE("eval_series: Gauss contiguous relation (a-b)F = aF(a+) - bF(b+)") {
    Rng rng(21);
    int tested = 0;
    while (tested < 50) {
        Cx a(rng.uniform(-3.0, 3.0), rng.uniform(-1.0, 1.0));
        Cx b(rng.uniform(-3.0, 3.0), rng.uniform(-1.0, 1.0));
        Cx c(rng.uniform(0.5, 4.0), 0.0);
        if (std::abs(a - b) < 0.3) continue;
        Cx x(rng.uniform(-0.6, 0.6), rng.uniform(-0.4, 0.4));
        if (std::abs(x) > 0.7) continue;
        Cx lhs = (a - b) * gauss_2f1(a, b, c, x);
        Cx rhs = a * gauss_2f1(a + 1.0, b, c, x) - b * gauss_2f1(a, b + 1.0, c, x);
        CHECK(rel_diff(lhs, rhs) < 1e-8);
        ++tested;
    }
}

TEST_CASE("eval_unit: terminating examples") {
    double b = 0.8, c = 2.6;
    auto rep = eval_unit(HypSpec({Cx(-1, 0), Cx(b, 0)}, {Cx(c, 0)}), 1e-12);
    CHECK(rep.terms_used == 2);
    CHECK(rel_diff(rep.value, Cx(1.0 - b / c, 0)) < 1e-14);

    auto rep2 =
        eval_unit(HypSpec({Cx(-2, 0), Cx(1, 0), Cx(1, 0)}, {Cx(2, 0), Cx(2, 0)}), 1e-12);
    CHECK(rep2.terms_used == 3);
    CHECK(rel_diff(rep2.value, Cx(1.0 - 0.5 + 1.0 / 9.0, 0)) < 1e-14);
}

TEST_CASE("eval_unit: Gauss summation oracle at 100 admissible draws") {
    Rng rng = Rng::stream(77, "gauss-unit-oracle");
    for (int trial = 0; trial < 100; ++trial) {
        Cx a(rng.uniform(-1.5, 1.5), rng.uniform(-0.75, 0.75));
        Cx b(rng.uniform(-1.5, 1.5), rng.uniform(-0.75, 0.75));
        // Excess sampled in [2, 3.5]: always satisfies the stated
        // Re(c-a-b) > 0.3 while keeping plain summation fast and accurate.
        Cx c = a + b + Cx(rng.uniform(2.0, 3.5), 0.0);
        auto rep = eval_unit(HypSpec({a, b}, {c}), 1e-9);
        CHECK(rep.converged);
        Cx oracle = gamma_ratio({c, c - a - b}, {c - a, c - b});
        CHECK(rel_diff(rep.value, oracle) < 1e-8);
    }
}

TEST_CASE("eval_unit: divergent and ill-posed cases rejected") {
    CHECK_THROWS_AS(eval_unit(HypSpec({Cx(1.5, 0), Cx(1.2, 0)}, {Cx(2.0, 0)}), 1e-8),
                    NonConvergent); // excess -0.7
    CHECK_THROWS_AS(
        eval_unit(HypSpec({Cx(0.5, 0), Cx(0.5, 0), Cx(0.5, 0)}, {Cx(4.0, 0)}), 1e-8),
        NonConvergent); // p > q+1
}

TEST_CASE("eval_unit: honest converged=false at the term cap") {
    long long saved = term_cap();
    set_term_cap(2000);
    auto rep = eval_unit(HypSpec({Cx(0.5, 0), Cx(0.6, 0)}, {Cx(1.6, 0)}), 1e-12);
    set_term_cap(saved);
    CHECK_FALSE(rep.converged);
    CHECK(rep.terms_used == 2000);
    // The value is still a plausible partial sum and the tail bound nonzero.
    CHECK(rep.tail_bound > 0.0);
}

TEST_CASE("eval_unit: p <= q converges at x=1 via power-series majorant") {
    // 1F1(0.7; 2.2; 1) against its Kummer transform e * 1F1(1.5; 2.2; -1).
    auto rep = eval_unit(HypSpec({Cx(0.7, 0)}, {Cx(2.2, 0)}), 1e-12);
    CHECK(rep.converged);
    auto transformed = eval_series(HypSpec({Cx(1.5, 0)}, {Cx(2.2, 0)}), Cx(-1.0, 0), 1e-12);
    CHECK(rel_diff(rep.value, std::exp(1.0) * transformed.value) < 1e-10);
}

TEST_CASE("eval_series: entire p <= q series accepts large real arguments") {
    // 1F1(0.5; 2.5; 15) against e^15 * 1F1(2, 2.5, -15); the alternating side
    // cancels heavily, which the max_partial diagnostic must expose.
    auto grow = eval_series(HypSpec({Cx(0.5, 0)}, {Cx(2.5, 0)}), Cx(15.0, 0), 1e-13);
    auto alt = eval_series(HypSpec({Cx(2.0, 0)}, {Cx(2.5, 0)}), Cx(-15.0, 0), 1e-13);
    CHECK(grow.converged);
    CHECK(alt.converged);
    CHECK(rel_diff(grow.value, std::exp(15.0) * alt.value) < 1e-5);
    CHECK(alt.max_partial > 100.0 * std::abs(alt.value));
}

TEST_CASE("eval_ipd_lhs: assembly and termination") {
    IpdSpec spec({Cx(3, 0)}, {2});
    auto at_zero = eval_ipd_lhs(Cx(1, 0), Cx(1, 0), Cx(1 + 2 - 1, 0), spec, Cx(0, 0), 1e-10);
    CHECK(at_zero.value == Cx(1.0, 0.0));

    auto assembled = eval_ipd_lhs(std::nullopt, Cx(0.7, 0), Cx(2.7, 0), spec, Cx(0.3, 0), 1e-11);
    auto by_hand =
        eval_series(HypSpec({Cx(0.7, 0), Cx(5, 0)}, {Cx(2.7, 0), Cx(3, 0)}), Cx(0.3, 0), 1e-11);
    CHECK(assembled.value.real() == by_hand.value.real());
    CHECK(assembled.value.imag() == by_hand.value.imag());

    auto term = eval_ipd_lhs(Cx(-3, 0), Cx(0.9, 0), Cx(2.4, 0), spec, Cx(0.5, 0), 1e-11);
    CHECK(term.terms_used == 4);
    CHECK(term.converged);
}
