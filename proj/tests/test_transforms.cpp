#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "hypid/charpoly.hpp"
#include "hypid/rng.hpp"
#include "hypid/transforms.hpp"

using namespace hypid;

namespace {

double rel_diff(Cx a, Cx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); }

double fact(int n) {
    double v = 1.0;
    for (int i = 2; i <= n; ++i) v *= i;
    return v;
}

// Minimum distance from z to the integers in [lo, hi].
double int_window_dist(Cx z, int lo, int hi) {
    double d = 1e300;
    for (int t = lo; t <= hi; ++t) d = std::min(d, std::abs(z - Cx(double(t))));
    return d;
}

IpdSpec draw_spec(Rng& rng, int r_max, int m_total_max) {
    int r = rng.uniform_int(1, r_max);
    ParamVec f;
    std::vector<int> m;
    int left = m_total_max - r;
    for (int j = 0; j < r; ++j) {
        int extra = left > 0 ? static_cast<int>(rng.uniform_int(0, left)) : 0;
        left -= extra;
        m.push_back(1 + extra);
        f.push_back(Cx(rng.uniform(0.6, 4.4)));
    }
    return IpdSpec(f, m);
}

Cx draw_x(Rng& rng, double radius) {
    double rho = rng.uniform(0.0, radius);
    double phi = rng.uniform(0.0, 6.283185307179586);
    return Cx(rho * std::cos(phi), rho * std::sin(phi));
}

// Margin-0.05 guard against the integer windows the degenerate identities
// exclude: f_j - base in {m-q-m_j..0} and (for the second kind) a-b in
// {q+1-m..q}.
bool window_clear(Cx base, const IpdSpec& spec, int q, double margin) {
    int m = spec.m_total();
    for (int j = 0; j < spec.r(); ++j) {
        int lo = m - q - spec.m[j];
        if (lo > 0) continue;
        if (int_window_dist(spec.f[size_t(j)] - base, lo, 0) < margin) return false;
    }
    return true;
}

} // namespace

TEST_CASE("identity names round-trip") {
    for (IdentityId id : {IdentityId::MP1, IdentityId::THM3, IdentityId::COR2ALT,
                          IdentityId::COR5B, IdentityId::INTRO_A, IdentityId::LIMIT_M1}) {
        CHECK(identity_from_name(identity_name(id)) == id);
    }
    CHECK(identity_from_name("cor1A") == IdentityId::COR1A);
    CHECK_THROWS_AS(identity_from_name("nope"), ParseError);
}

TEST_CASE("every identity is trivial at x = 0") {
    IpdSpec s1({Cx(2.0)}, {1});
    IpdSpec s2({Cx(1.7), Cx(3.1)}, {2, 1});
    Cx a(0.4), b(0.7);
    CHECK(mp_first(a, b, Cx(3.1), s1, 0.0).rel_err < 1e-13);
    CHECK(mp_kummer(b, Cx(3.1), s1, 0.0).rel_err < 1e-13);
    CHECK(mp_second(a, b, Cx(4.2), s1, 0.0).rel_err < 1e-13);
    CHECK(thm1_degenerate(a, b, s2, 1, 0.0).rel_err < 1e-13);
    CHECK(thm2_degenerate_kummer(b, s2, 1, 0.0).rel_err < 1e-13);
    CHECK(thm3_degenerate(a, b, s2, 1, 0.0).rel_err < 1e-13);
    CHECK(cor_q0(Variant::First, a, b, s2, 0.0).rel_err < 1e-13);
    CHECK(cor_q0(Variant::Kummer, std::nullopt, b, s2, 0.0).rel_err < 1e-13);
    CHECK(cor_q0(Variant::Second, a, b, s2, 0.0).rel_err < 1e-13);
    CHECK(cor_q0(Variant::SecondAlt, a, b, s2, 0.0).rel_err < 1e-13);
    CHECK(cor_qm1(Variant::First, a, b, s2, 0.0).rel_err < 1e-13);
    CHECK(cor_qm1(Variant::Kummer, std::nullopt, b, s2, 0.0).rel_err < 1e-13);
    CHECK(cor_qm1(Variant::Second, a, b, s2, 0.0).rel_err < 1e-13);
    CHECK(cor_qm2(Variant::First, a, b, s2, 0.0).rel_err < 1e-13);
    CHECK(cor_qm2(Variant::Kummer, std::nullopt, b, s2, 0.0).rel_err < 1e-13);
    CHECK(cor_qm2(Variant::Second, a, b, s2, 0.0).rel_err < 1e-13);
    CHECK(intro_identities(Variant::First, a, b, Cx(1.6), 0.0).rel_err < 1e-13);
    CHECK(intro_identities(Variant::Second, a, b, Cx(1.6), 0.0).rel_err < 1e-13);
}

TEST_CASE("first transformation at fixed points") {
    IpdSpec spec({Cx(2.0)}, {1});
    SUBCASE("terminating") {
        Residual r = mp_first(Cx(-2.0), Cx(0.6), Cx(3.1), spec, Cx(0.4));
        CHECK(r.rel_err < 1e-10);
        CHECK(r.lhs_report.converged);
        CHECK(r.rhs_report.converged);
    }
    SUBCASE("generic point") {
        CHECK(mp_first(Cx(1.2), Cx(0.6), Cx(3.1), spec, Cx(-0.3)).rel_err < 1e-8);
        IpdSpec two({Cx(1.7)}, {2});
        CHECK(mp_first(Cx(0.9), Cx(0.45), Cx(3.3), two, Cx(0.25, 0.2)).rel_err < 1e-8);
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(mp_first(Cx(1.0), Cx(0.6), Cx(3.1), spec, Cx(0.7)), ConstraintViolation);
        CHECK_THROWS_AS(mp_first(Cx(1.0), Cx(0.6), Cx(3.1), spec, Cx(1.4)), ConstraintViolation);
    }
}

TEST_CASE("exponential transformation at fixed points") {
    IpdSpec spec({Cx(2.0)}, {1});
    CHECK(mp_kummer(Cx(0.6), Cx(3.1), spec, Cx(2.5)).rel_err < 1e-9);
    // Large negative argument: e^x against an alternating series loses digits;
    // the identity must still hold to the relaxed bound.
    CHECK(mp_kummer(Cx(0.6), Cx(3.1), spec, Cx(-5.0)).rel_err < 1e-6);
    IpdSpec two({Cx(1.3), Cx(2.6)}, {1, 2});
    CHECK(mp_kummer(Cx(0.8), Cx(4.6), two, Cx(3.0)).rel_err < 1e-8);
    CHECK_THROWS_AS(mp_kummer(Cx(0.6), Cx(3.1), spec, Cx(25.0)), ConstraintViolation);
}

TEST_CASE("second transformation at fixed points and against the first") {
    IpdSpec spec({Cx(2.0)}, {1});
    Cx a(0.3), b(0.6), c(4.2), x(0.35);
    Residual r2 = mp_second(a, b, c, spec, x);
    CHECK(r2.rel_err < 1e-8);
    Residual r1 = mp_first(a, b, c, spec, x);
    // Both right-hand sides represent the same left side.
    CHECK(rel_diff(r1.rhs, r2.rhs) < 1e-8);
    CHECK_THROWS_AS(mp_second(a, b, a + b + 1.0, spec, x), ConstraintViolation);
}

TEST_CASE("first-kind degenerate identity across q") {
    SUBCASE("single difference") {
        IpdSpec spec({Cx(3.0)}, {2});
        CHECK(thm1_degenerate(Cx(0.4), Cx(0.7), spec, 0, Cx(0.3)).rel_err < 1e-8);
        CHECK(thm1_degenerate(Cx(0.4), Cx(0.7), spec, 1, Cx(0.3)).rel_err < 1e-8);
    }
    SUBCASE("two differences") {
        IpdSpec spec({Cx(1.6), Cx(2.9)}, {1, 2});
        for (int q = 0; q < 3; ++q)
            CHECK(thm1_degenerate(Cx(0.45), Cx(0.8), spec, q, Cx(-0.25)).rel_err < 1e-7);
    }
    SUBCASE("constraints") {
        IpdSpec spec({Cx(3.0)}, {2});
        CHECK_THROWS_AS(thm1_degenerate(Cx(0.4), Cx(0.7), spec, 2, Cx(0.3)),
                        ConstraintViolation);
        CHECK_THROWS_AS(thm1_degenerate(Cx(0.4), Cx(-2.0), spec, 0, Cx(0.3)),
                        ConstraintViolation);
        IpdSpec one({Cx(0.7)}, {1});
        CHECK_THROWS_AS(thm1_degenerate(Cx(0.4), Cx(0.7), one, 0, Cx(0.3)),
                        ConstraintViolation);
    }
}

TEST_CASE("exponential degenerate identity across q") {
    IpdSpec spec({Cx(1.6), Cx(2.9)}, {1, 2});
    for (int q = 0; q < 3; ++q)
        CHECK(thm2_degenerate_kummer(Cx(0.8), spec, q, Cx(2.0)).rel_err < 1e-8);
}

TEST_CASE("second-kind degenerate identity across q") {
    IpdSpec spec({Cx(1.6), Cx(2.9)}, {1, 2});
    for (int q = 0; q < 3; ++q)
        CHECK(thm3_degenerate(Cx(0.45), Cx(0.7), spec, q, Cx(0.28)).rel_err < 1e-7);
    CHECK_THROWS_AS(thm3_degenerate(Cx(0.7), Cx(0.7), spec, 0, Cx(0.28)),
                    ConstraintViolation);
}

TEST_CASE("degenerate right sides coincide with the specialized corollaries") {
    IpdSpec spec({Cx(1.45), Cx(2.8)}, {2, 1});
    Cx a(0.52), b(0.77), x(0.28), xe(1.5);

    SUBCASE("first kind") {
        CHECK(rel_diff(thm1_degenerate(a, b, spec, 0, x).rhs,
                       cor_q0(Variant::First, a, b, spec, x).rhs) < 1e-10);
        CHECK(rel_diff(thm1_degenerate(a, b, spec, 2, x).rhs,
                       cor_qm1(Variant::First, a, b, spec, x).rhs) < 1e-10);
        CHECK(rel_diff(thm1_degenerate(a, b, spec, 1, x).rhs,
                       cor_qm2(Variant::First, a, b, spec, x).rhs) < 1e-10);
    }
    SUBCASE("exponential") {
        CHECK(rel_diff(thm2_degenerate_kummer(b, spec, 0, xe).rhs,
                       cor_q0(Variant::Kummer, std::nullopt, b, spec, xe).rhs) < 1e-10);
        CHECK(rel_diff(thm2_degenerate_kummer(b, spec, 2, xe).rhs,
                       cor_qm1(Variant::Kummer, std::nullopt, b, spec, xe).rhs) < 1e-10);
        CHECK(rel_diff(thm2_degenerate_kummer(b, spec, 1, xe).rhs,
                       cor_qm2(Variant::Kummer, std::nullopt, b, spec, xe).rhs) < 1e-10);
    }
    SUBCASE("second kind") {
        CHECK(rel_diff(thm3_degenerate(a, b, spec, 0, x).rhs,
                       cor_q0(Variant::Second, a, b, spec, x).rhs) < 1e-10);
        CHECK(rel_diff(thm3_degenerate(a, b, spec, 0, x).rhs,
                       cor_q0(Variant::SecondAlt, a, b, spec, x).rhs) < 1e-10);
        CHECK(rel_diff(thm3_degenerate(a, b, spec, 2, x).rhs,
                       cor_qm1(Variant::Second, a, b, spec, x).rhs) < 1e-10);
        CHECK(rel_diff(thm3_degenerate(a, b, spec, 1, x).rhs,
                       cor_qm2(Variant::Second, a, b, spec, x).rhs) < 1e-10);
    }
}

TEST_CASE("single-root corollary reproduces the 4F4 worked example") {
    // r = 3, shifts (1,1,2), so q = 2 is the q = m-2 family.
    Cx b(0.55);
    ParamVec f{Cx(1.3), Cx(2.1), Cx(3.4)};
    IpdSpec spec(f, {1, 1, 2});
    Cx x(1.6);

    Residual thm = thm2_degenerate_kummer(b, spec, 2, x);
    CHECK(thm.rel_err < 1e-9);
    Residual cor = cor_qm2(Variant::Kummer, std::nullopt, b, spec, x);
    CHECK(cor.rel_err < 1e-9);
    CHECK(rel_diff(thm.rhs, cor.rhs) < 1e-10);

    // Printed constants of the worked example.
    Cx lam = 1.0 + b -
             b * (f[0] - b - 1.0) * (f[1] - b - 1.0) * (f[2] - b - 1.0) /
                 ((f[0] - b) * (f[1] - b) * (f[2] - b + 1.0));
    Cx bigb = ((b + 4.0) * (f[0] - b) * (f[1] - b) * pochhammer(f[2] - b, 2) -
               b * (f[0] - b - 1.0) * (f[1] - b - 1.0) * pochhammer(f[2] - b - 1.0, 2)) /
              (pochhammer(b + 2.0, 3) * f[0] * f[1] * f[2] * (f[2] + 1.0));
    Cx head = 0.0;
    for (int j = 0; j <= 2; ++j) {
        ParamVec top{Cx(double(-j)), b};
        for (size_t i = 0; i < f.size(); ++i) top.push_back(f[i] + double(spec.m[i]));
        ParamVec bot{b + 2.0};
        for (const Cx& ff : f) bot.push_back(ff);
        head += pow_int(-x, j) / fact(j) * eval_unit(HypSpec(top, bot), 1e-12).value;
    }
    Cx tail = pow_int(-x, 3) * bigb *
              eval_series(HypSpec({Cx(1.0), lam + 4.0}, {b + 5.0, lam + 3.0}), -x, 1e-12).value;
    CHECK(rel_diff(head + tail, thm.rhs) < 1e-10);
}

TEST_CASE("q=0 corollary reproduces the two-difference worked example") {
    // r = 1, m = 2: weight (b)_2/(f)_2 and the single-root series in y.
    Cx a(0.37), b(0.64), f(1.9), x(0.31);
    IpdSpec spec({f}, {2});
    Residual r = cor_q0(Variant::First, a, b, spec, x);
    CHECK(r.rel_err < 1e-10);

    Cx lam1 = (f + b + 1.0) / (f - b + 1.0);
    Cx y = x / (x - 1.0);
    Cx rhs = pochhammer(b, 2) +
             (pochhammer(f, 2) - pochhammer(b, 2)) *
                 eval_series(HypSpec({a, Cx(1.0), lam1 + 1.0}, {b + 2.0, lam1}), y, 1e-12).value;
    Cx lhs = pochhammer(f, 2) * std::pow(1.0 - x, a) *
             eval_ipd_lhs(a, b, b + 2.0, spec, x, 1e-12).value;
    CHECK(rel_diff(lhs, rhs) < 1e-9);
}

TEST_CASE("second-kind q=0 corollary reproduces the worked 3F2 example") {
    Cx a(0.41), b(0.73), f(1.8), x(0.33);
    IpdSpec spec({f}, {2});
    Residual r = cor_q0(Variant::Second, a, b, spec, x);
    CHECK(r.rel_err < 1e-9);
    Residual ralt = cor_q0(Variant::SecondAlt, a, b, spec, x);
    CHECK(ralt.rel_err < 1e-9);

    Cx gam = ((1.0 + a - b) * (1.0 + f) + a * (f - b)) /
             ((1.0 + a - b) * (1.0 + f) - a * (f - b));
    Cx rhs = 1.0 + x * b * (a * (f + 2.0) / ((a + 2.0) * f) - 1.0) *
                       eval_series(HypSpec({Cx(1.0), a - b + 1.0, gam + 2.0},
                                           {a + 3.0, gam + 1.0}),
                                   x, 1e-12).value;
    CHECK(rel_diff(rhs, r.rhs) < 1e-9);
}

TEST_CASE("m=1 second-kind corollary meets the warm-up identities") {
    Cx a(0.4), b(0.7), f(1.6), x(0.3);
    IpdSpec spec({f}, {1});
    Residual cor = cor_qm1(Variant::Second, a, b, spec, x);
    Residual ia = intro_identities(Variant::First, a, b, f, x);
    Residual ib = intro_identities(Variant::Second, a, b, f, x);
    CHECK(cor.rel_err < 1e-10);
    CHECK(ia.rel_err < 1e-9);
    CHECK(ib.rel_err < 1e-9);
    CHECK(rel_diff(cor.rhs, ia.rhs) < 1e-9);
    // Euler-Pfaff moves one form into the other: both right sides evaluate
    // the same left side.
    CHECK(rel_diff(ia.rhs, ib.rhs) < 1e-9);
    CHECK_THROWS_AS(intro_identities(Variant::First, a, a, f, x), ConstraintViolation);
    CHECK_THROWS_AS(intro_identities(Variant::Second, f, b, f, x), ConstraintViolation);
}

TEST_CASE("generating limit identity at small epsilon") {
    Residual r = limit_m1({Cx(1.0), Cx(1.0)}, {Cx(2.0)}, Cx(2.0), Cx(0.3));
    CHECK(r.rel_err < 1e-5);
    // alpha = 1 cancels the perturbation exactly.
    Residual unit = limit_m1({Cx(1.2), Cx(0.7)}, {Cx(2.4)}, Cx(1.0), Cx(0.25));
    CHECK(unit.rel_err < 1e-9);
    CHECK_THROWS_AS(limit_m1({Cx(1.0)}, {Cx(2.0)}, Cx(2.0), Cx(0.3)), ConstraintViolation);
}

TEST_CASE("terminating parameters close both sides exactly") {
    IpdSpec s1({Cx(2.0)}, {1});
    IpdSpec s2({Cx(1.6), Cx(2.9)}, {1, 2});
    for (int n = 1; n <= 6; ++n) {
        Cx a(double(-n));
        CHECK(mp_first(a, Cx(0.6), Cx(3.1), s1, Cx(0.4)).rel_err < 1e-12);
        for (int q = 0; q < 3; ++q)
            CHECK(thm1_degenerate(a, Cx(0.8), s2, q, Cx(0.3)).rel_err < 1e-12);
    }
    CHECK(cor_q0(Variant::First, Cx(-3.0), Cx(0.8), s2, Cx(0.3)).rel_err < 1e-12);
    CHECK(cor_qm1(Variant::First, Cx(-4.0), Cx(0.8), s2, Cx(0.3)).rel_err < 1e-12);
    CHECK(cor_qm2(Variant::First, Cx(-4.0), Cx(0.8), s2, Cx(0.3)).rel_err < 1e-12);
    CHECK(intro_identities(Variant::Second, Cx(0.45), Cx(-3.0), Cx(1.8), Cx(0.3)).rel_err <
          1e-12);
}

TEST_CASE("degenerate left side is the limit of the generic one") {
    IpdSpec spec({Cx(1.6), Cx(2.9)}, {1, 2});
    Cx a(0.45), b(0.8), x(0.3);
    const double eps = 1e-6;
    for (int q = 0; q < 3; ++q) {
        Residual deg = thm1_degenerate(a, b, spec, q, x);
        Cx c = b + double(spec.m_total() - q) + eps;
        Cx lim = std::pow(1.0 - x, a) * eval_ipd_lhs(a, b, c, spec, x, 1e-12).value;
        CHECK(rel_diff(deg.lhs, lim) < 1e-5);
    }
    Residual deg3 = thm3_degenerate(a, b, spec, 1, x);
    Cx c3 = a + 2.0 + eps;
    Cx lim3 = std::pow(1.0 - x, b + 1.0) * eval_ipd_lhs(a, b, c3, spec, x, 1e-12).value;
    CHECK(rel_diff(deg3.lhs, lim3) < 1e-5);
}

TEST_CASE("exponential identity is the confluent limit of the first kind") {
    IpdSpec spec({Cx(2.2)}, {2});
    Cx b(0.7), x(1.2);
    const Cx big(1e4);
    for (int q = 0; q < 2; ++q) {
        Residual conf = thm2_degenerate_kummer(b, spec, q, x);
        Residual gen = thm1_degenerate(big, b, spec, q, x / big);
        CHECK(std::abs(conf.lhs - gen.lhs) < 1e-3);
        CHECK(std::abs(conf.rhs - gen.rhs) < 1e-3);
    }
}

TEST_CASE("random sweep stays within the working tolerance") {
    Rng rng = Rng::stream(201, "transforms-sweep");
    const double margin = 0.05;
    int done = 0;
    while (done < 40) {
        IpdSpec spec = draw_spec(rng, 3, 5);
        int m = spec.m_total();
        Cx a(rng.uniform(-2.0, 3.0)), b(rng.uniform(-2.0, 3.0));
        Cx x = draw_x(rng, 0.45);
        int q = int(rng.uniform_int(0, m - 1));

        Cx c_free = b + double(m) + rng.uniform(0.3, 2.0);
        CHECK(mp_first(a, b, c_free, spec, x).rel_err < 1e-6);
        CHECK(mp_kummer(b, c_free, spec, 4.0 * x).rel_err < 1e-6);
        // The second transformation also needs (c-a-m)_m and (1+a+b-c)_m
        // away from zero.
        if (int_window_dist(c_free - a, 1, m) > margin &&
            int_window_dist(c_free - a - b, 1, m) > margin)
            CHECK(mp_second(a, b, c_free, spec, x).rel_err < 1e-6);

        if (window_clear(b, spec, q, margin) &&
            !is_nonpositive_integer(b + double(m - q), margin)) {
            CHECK(thm1_degenerate(a, b, spec, q, x).rel_err < 1e-6);
            CHECK(thm2_degenerate_kummer(b, spec, q, 4.0 * x).rel_err < 1e-6);
        }
        if (window_clear(a, spec, q, margin) &&
            !is_nonpositive_integer(a + double(m - q), margin) &&
            int_window_dist(a - b, q + 1 - m, q) > margin)
            CHECK(thm3_degenerate(a, b, spec, q, x).rel_err < 1e-6);
        ++done;
    }
}
