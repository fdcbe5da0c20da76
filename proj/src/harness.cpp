#include "hypid/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "hypid/errors.hpp"
#include "hypid/rng.hpp"
#include "hypid/summation.hpp"

namespace hypid {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// formatting

std::string fmt_double(double v) {
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

std::string fmt_cx(Cx z) {
    if (z.imag() == 0.0) return fmt_double(z.real());
    std::string out = fmt_double(z.real());
    out += z.imag() < 0.0 ? " - " : " + ";
    out += fmt_double(std::abs(z.imag()));
    out += "i";
    return out;
}

json jcx(Cx z) { return json::array({z.real(), z.imag()}); }

// ---------------------------------------------------------------------------
// sampling helpers

// Distance from z to the nearest non-positive integer: the pole set of a
// bottom parameter (stepping by +1 can only reach poles in that set).
double dist_nonpos_int(Cx z) {
    const double n = std::min(0.0, std::round(z.real()));
    return std::abs(z - Cx(n, 0.0));
}

bool clear_nonpos(Cx z, double band) { return dist_nonpos_int(z) >= band; }

bool window_clear(Cx z, int lo, int hi, double band) {
    for (int t = lo; t <= hi; ++t)
        if (std::abs(z - Cx(static_cast<double>(t), 0.0)) < band) return false;
    return true;
}

bool f_windows_clear(Cx base, const IpdSpec& spec, double band) {
    const int m = spec.m_total();
    for (const Cx& fj : spec.f)
        if (!window_clear(fj - base, -m, m, band)) return false;
    return true;
}

// All roots of p, shifted, must stay a band away from the bottom-pole set.
bool roots_clear(const CPoly& p, double shift, double band) {
    if (p.degree() <= 0) return true;
    for (const Cx& z : roots(p).roots)
        if (!clear_nonpos(z + Cx(shift, 0.0), band)) return false;
    return true;
}

IpdSpec draw_spec(Rng& rng, const RunConfig& cfg, int min_total = 1) {
    const int r = rng.uniform_int(1, cfg.r_max);
    const int lo = std::max(r, min_total);
    const int total = rng.uniform_int(lo, std::max(lo, cfg.m_total_max));
    std::vector<int> m(static_cast<size_t>(r), 1);
    for (int left = total - r; left > 0; --left) m[static_cast<size_t>(rng.uniform_int(0, r - 1))] += 1;
    ParamVec f;
    for (int j = 0; j < r; ++j) f.push_back(Cx(rng.uniform(0.6, 4.4), 0.0));
    return IpdSpec(std::move(f), std::move(m));
}

Cx draw_x(Rng& rng, const RunConfig& cfg) {
    for (;;) {
        const Cx x(rng.uniform(-cfg.x_box, cfg.x_box), rng.uniform(-cfg.x_box, cfg.x_box));
        if (std::abs(x) <= cfg.x_box) return x;
    }
}

// ---------------------------------------------------------------------------
// per-identity drawers

struct Drawn {
    json params;
    Residual res;
};

void put_spec(json& P, const IpdSpec& spec) {
    json f = json::array(), m = json::array();
    for (const Cx& z : spec.f) f.push_back(z.real());
    for (int mi : spec.m) m.push_back(mi);
    P["f"] = f;
    P["m"] = m;
}

// One sampling attempt; nullopt signals a guard-band rejection and any
// library error propagates (the caller resamples on both).
std::optional<Drawn> try_draw(const std::string& id, Rng& rng, const RunConfig& cfg) {
    const double band = cfg.guard_band;
    const double ftol = 1e-12;
    const double utol = std::max(cfg.rel_tol / 20.0, 1e-9);
    json P;

    if (id == "mp1" || id == "mp2") {
        IpdSpec spec = draw_spec(rng, cfg);
        const int m = spec.m_total();
        const Cx b(rng.uniform(-1.5, 2.5), 0.0), c(rng.uniform(1.0, 6.0), 0.0);
        const Cx a(rng.uniform(-1.5, 2.5), 0.0);
        const Cx x = draw_x(rng, cfg);
        if (!window_clear(c - b, 1, m, band)) return std::nullopt;
        if (!roots_clear(qm_poly(b, c, spec), 0.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["b"] = b.real();
        P["c"] = c.real();
        P["x"] = jcx(x);
        if (id == "mp1") {
            P["a"] = a.real();
            return Drawn{P, mp_first(a, b, c, spec, x, ftol)};
        }
        return Drawn{P, mp_kummer(b, c, spec, x, ftol)};
    }
    if (id == "mp3") {
        IpdSpec spec = draw_spec(rng, cfg);
        const int m = spec.m_total();
        const Cx a(rng.uniform(-1.5, 2.5), 0.0), b(rng.uniform(-1.5, 2.5), 0.0);
        const Cx c(rng.uniform(1.0, 6.0), 0.0);
        const Cx x = draw_x(rng, cfg);
        if (!window_clear(c - a, 1, m, band)) return std::nullopt;
        if (!window_clear(c - b, 1, m, band)) return std::nullopt;
        if (!window_clear(c - a - b, 1, m, band)) return std::nullopt;
        if (!roots_clear(qmhat_poly(a, b, c, spec), 0.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["a"] = a.real();
        P["b"] = b.real();
        P["c"] = c.real();
        P["x"] = jcx(x);
        return Drawn{P, mp_second(a, b, c, spec, x, ftol)};
    }
    if (id == "thm1" || id == "thm2") {
        IpdSpec spec = draw_spec(rng, cfg);
        const int q = rng.uniform_int(0, spec.m_total() - 1);
        const Cx a(rng.uniform(-1.5, 2.5), 0.0), b(rng.uniform(0.3, 2.5), 0.0);
        const Cx x = draw_x(rng, cfg);
        if (!f_windows_clear(b, spec, band)) return std::nullopt;
        if (!roots_clear(r_poly(b, spec, q), q + 1.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["b"] = b.real();
        P["q"] = q;
        P["x"] = jcx(x);
        if (id == "thm1") {
            P["a"] = a.real();
            return Drawn{P, thm1_degenerate(a, b, spec, q, x, ftol)};
        }
        return Drawn{P, thm2_degenerate_kummer(b, spec, q, x, ftol)};
    }
    if (id == "thm3") {
        IpdSpec spec = draw_spec(rng, cfg);
        const int m = spec.m_total();
        const int q = rng.uniform_int(0, m - 1);
        const Cx a(rng.uniform(0.2, 2.0), 0.0), b(rng.uniform(-1.0, 2.0), 0.0);
        const Cx x = draw_x(rng, cfg);
        if (!f_windows_clear(a, spec, band)) return std::nullopt;
        if (!window_clear(a - b, -m, m, band)) return std::nullopt;
        if (!roots_clear(rhat_poly(a, b, spec, q), q + 1.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["a"] = a.real();
        P["b"] = b.real();
        P["q"] = q;
        P["x"] = jcx(x);
        return Drawn{P, thm3_degenerate(a, b, spec, q, x, ftol)};
    }
    if (id == "cor1a" || id == "cor1b") {
        IpdSpec spec = draw_spec(rng, cfg);
        const Cx a(rng.uniform(-1.5, 2.5), 0.0), b(rng.uniform(0.3, 2.5), 0.0);
        const Cx x = draw_x(rng, cfg);
        if (!f_windows_clear(b, spec, band)) return std::nullopt;
        if (!roots_clear(r_poly(b, spec, 0), 0.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["b"] = b.real();
        P["x"] = jcx(x);
        if (id == "cor1a") {
            P["a"] = a.real();
            return Drawn{P, cor_q0(Variant::First, a, b, spec, x, ftol)};
        }
        return Drawn{P, cor_q0(Variant::Kummer, std::nullopt, b, spec, x, ftol)};
    }
    if (id == "cor2" || id == "cor2alt") {
        IpdSpec spec = draw_spec(rng, cfg);
        const int m = spec.m_total();
        const Cx a(rng.uniform(0.2, 2.0), 0.0), b(rng.uniform(-1.0, 2.0), 0.0);
        const Cx x = draw_x(rng, cfg);
        if (!f_windows_clear(a, spec, band)) return std::nullopt;
        if (!window_clear(a - b, -m, m, band)) return std::nullopt;
        if (!roots_clear(rhat_poly(a, b, spec, 0), 0.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["a"] = a.real();
        P["b"] = b.real();
        P["x"] = jcx(x);
        const Variant v = id == "cor2" ? Variant::Second : Variant::SecondAlt;
        return Drawn{P, cor_q0(v, a, b, spec, x, ftol)};
    }
    if (id == "cor3a" || id == "cor3b") {
        IpdSpec spec = draw_spec(rng, cfg);
        const Cx a(rng.uniform(-1.5, 2.5), 0.0), b(rng.uniform(0.3, 2.5), 0.0);
        const Cx x = draw_x(rng, cfg);
        if (!f_windows_clear(b, spec, band)) return std::nullopt;
        put_spec(P, spec);
        P["b"] = b.real();
        P["x"] = jcx(x);
        if (id == "cor3a") {
            P["a"] = a.real();
            return Drawn{P, cor_qm1(Variant::First, a, b, spec, x, ftol)};
        }
        return Drawn{P, cor_qm1(Variant::Kummer, std::nullopt, b, spec, x, ftol)};
    }
    if (id == "cor4") {
        IpdSpec spec = draw_spec(rng, cfg);
        const int m = spec.m_total();
        const Cx a(rng.uniform(0.2, 2.0), 0.0), b(rng.uniform(-1.0, 2.0), 0.0);
        const Cx x = draw_x(rng, cfg);
        if (!f_windows_clear(a, spec, band)) return std::nullopt;
        if (!window_clear(a - b, -m, m, band)) return std::nullopt;
        put_spec(P, spec);
        P["a"] = a.real();
        P["b"] = b.real();
        P["x"] = jcx(x);
        return Drawn{P, cor_qm1(Variant::Second, a, b, spec, x, ftol)};
    }
    if (id == "cor5a" || id == "cor5b") {
        IpdSpec spec = draw_spec(rng, cfg, 2);
        const int m = spec.m_total();
        const Cx a(rng.uniform(-1.5, 2.5), 0.0), b(rng.uniform(0.3, 2.5), 0.0);
        const Cx x = draw_x(rng, cfg);
        if (!f_windows_clear(b, spec, band)) return std::nullopt;
        if (!roots_clear(r_poly(b, spec, m - 2), m - 1.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["b"] = b.real();
        P["x"] = jcx(x);
        if (id == "cor5a") {
            P["a"] = a.real();
            return Drawn{P, cor_qm2(Variant::First, a, b, spec, x, ftol)};
        }
        return Drawn{P, cor_qm2(Variant::Kummer, std::nullopt, b, spec, x, ftol)};
    }
    if (id == "cor6") {
        IpdSpec spec = draw_spec(rng, cfg, 2);
        const int m = spec.m_total();
        const Cx a(rng.uniform(0.2, 2.0), 0.0), b(rng.uniform(-1.0, 2.0), 0.0);
        const Cx x = draw_x(rng, cfg);
        if (!f_windows_clear(a, spec, band)) return std::nullopt;
        if (!window_clear(a - b, -m, m, band)) return std::nullopt;
        if (!roots_clear(rhat_poly(a, b, spec, m - 2), m - 1.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["a"] = a.real();
        P["b"] = b.real();
        P["x"] = jcx(x);
        return Drawn{P, cor_qm2(Variant::Second, a, b, spec, x, ftol)};
    }
    if (id == "intro_a" || id == "intro_b") {
        const Cx a(rng.uniform(0.2, 2.0), 0.0), b(rng.uniform(-1.0, 2.0), 0.0);
        const Cx f(rng.uniform(0.6, 4.4), 0.0);
        const Cx x = draw_x(rng, cfg);
        P["a"] = a.real();
        P["b"] = b.real();
        P["f"] = f.real();
        P["x"] = jcx(x);
        if (id == "intro_a") {
            if (std::abs(a - b) < band) return std::nullopt;
            return Drawn{P, intro_identities(Variant::First, a, b, f, x, ftol)};
        }
        if (std::abs(f - a) < band) return std::nullopt;
        return Drawn{P, intro_identities(Variant::Second, a, b, f, x, ftol)};
    }
    if (id == "limit_m1") {
        const Cx a1(rng.uniform(0.5, 3.0), 0.0), a2(rng.uniform(0.5, 3.0), 0.0);
        const Cx b1(rng.uniform(0.8, 3.5), 0.0);
        const Cx alpha(rng.uniform(0.5, 2.5), 0.0);
        const Cx x = draw_x(rng, cfg);
        const double eps = 1e-8;
        P["top"] = json::array({a1.real(), a2.real()});
        P["bottom"] = json::array({b1.real()});
        P["alpha"] = alpha.real();
        P["eps"] = eps;
        P["x"] = jcx(x);
        return Drawn{P, limit_m1({a1, a2}, {b1}, alpha, x, eps, ftol)};
    }
    if (id == "thm4") {
        IpdSpec spec = draw_spec(rng, cfg);
        const int q = rng.uniform_int(0, spec.m_total() - 1);
        const Cx b(rng.uniform(0.3, 2.5), 0.0);
        const Cx a(-q - rng.uniform(1.3, 3.0), 0.0);
        if (!f_windows_clear(b, spec, band)) return std::nullopt;
        put_spec(P, spec);
        P["a"] = a.real();
        P["b"] = b.real();
        P["q"] = q;
        return Drawn{P, karlsson_general(a, b, spec, q, utol)};
    }
    if (id == "thm5") {
        IpdSpec spec = draw_spec(rng, cfg);
        const int q = rng.uniform_int(0, spec.m_total() - 1);
        const int n = rng.uniform_int(1, 6);
        const Cx b(rng.uniform(0.3, 2.5), 0.0), d(rng.uniform(-1.5, 2.5), 0.0);
        const Cx e(rng.uniform(0.7, 3.0), 0.0);
        if (!f_windows_clear(b, spec, band)) return std::nullopt;
        if (!clear_nonpos(1.0 + d - e - Cx(n, 0.0), band)) return std::nullopt;
        if (!clear_nonpos(2.0 + d + Cx(q, 0.0) - e - Cx(n, 0.0), band)) return std::nullopt;
        if (!roots_clear(r_poly(b, spec, q), q + 1.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["n"] = n;
        P["b"] = b.real();
        P["d"] = d.real();
        P["e"] = e.real();
        P["q"] = q;
        return Drawn{P, thomae_like_1(n, b, d, e, spec, q, utol)};
    }
    if (id == "thm6" || id == "ex4") {
        IpdSpec spec = id == "ex4" ? IpdSpec({Cx(rng.uniform(0.6, 4.4), 0.0),
                                              Cx(rng.uniform(0.6, 4.4), 0.0),
                                              Cx(rng.uniform(0.6, 4.4), 0.0)},
                                             {1, 1, 2})
                                   : draw_spec(rng, cfg);
        const int m = spec.m_total();
        const int q = id == "ex4" ? 2 : rng.uniform_int(0, m - 1);
        const Cx a(rng.uniform(0.2, 1.5), 0.0), b(rng.uniform(0.3, 2.0), 0.0);
        const Cx d(rng.uniform(0.2, 1.5), 0.0);
        const Cx e = b + d + Cx(q, 0.0) + Cx(rng.uniform(1.3, 2.5), 0.0);
        if (!f_windows_clear(a, spec, band)) return std::nullopt;
        if (!window_clear(a - b, -m, m, band)) return std::nullopt;
        if (!roots_clear(rhat_poly(a, b, spec, q), q + 1.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["a"] = a.real();
        P["b"] = b.real();
        P["d"] = d.real();
        P["e"] = e.real();
        P["q"] = q;
        return Drawn{P, thomae_like_2(a, b, d, e, spec, q, utol)};
    }
    if (id == "cor7a") {
        IpdSpec spec = draw_spec(rng, cfg);
        const int n = rng.uniform_int(1, 6);
        const Cx b(rng.uniform(0.3, 2.5), 0.0), d(rng.uniform(-1.5, 2.5), 0.0);
        const Cx e(rng.uniform(0.7, 3.0), 0.0);
        if (!f_windows_clear(b, spec, band)) return std::nullopt;
        if (!clear_nonpos(e - d, band)) return std::nullopt;
        if (!clear_nonpos(1.0 + d - e - Cx(n, 0.0), band)) return std::nullopt;
        if (!roots_clear(r_poly(b, spec, 0), 0.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["n"] = n;
        P["b"] = b.real();
        P["d"] = d.real();
        P["e"] = e.real();
        return Drawn{P, cor_q0_unit(Variant::First, Cx(-n, 0.0), b, d, e, spec, utol)};
    }
    if (id == "cor7b" || id == "ex3_sum") {
        IpdSpec spec = id == "ex3_sum" ? IpdSpec({Cx(rng.uniform(0.6, 4.4), 0.0)}, {2})
                                       : draw_spec(rng, cfg);
        const int m = spec.m_total();
        const Cx a(rng.uniform(0.2, 1.5), 0.0), b(rng.uniform(0.3, 2.0), 0.0);
        const Cx d(rng.uniform(0.2, 1.5), 0.0);
        const Cx e = b + d + Cx(rng.uniform(1.3, 2.5), 0.0);
        if (!f_windows_clear(a, spec, band)) return std::nullopt;
        if (!window_clear(a - b, -m, m, band)) return std::nullopt;
        if (!roots_clear(rhat_poly(a, b, spec, 0), 1.0, band)) return std::nullopt;
        put_spec(P, spec);
        P["a"] = a.real();
        P["b"] = b.real();
        P["d"] = d.real();
        P["e"] = e.real();
        return Drawn{P, cor_q0_unit(Variant::Second, a, b, d, e, spec, utol)};
    }
    if (id == "red_lemma") {
        const int r = rng.uniform_int(1, 3);
        auto draw_top = [&rng]() {
            for (;;) {
                const double v = rng.uniform(0.3, 1.5);
                if (std::abs(v - 1.0) >= 0.25) return v;
            }
        };
        const Cx a1(draw_top(), 0.0), a2(draw_top(), 0.0);
        const Cx b1 = a1 + a2 + 2.0 + Cx(rng.uniform(0.0, 1.0), 0.0);
        P["top"] = json::array({a1.real(), a2.real()});
        P["bottom"] = json::array({b1.real()});
        P["r_int"] = r;
        return Drawn{P, pfq_unit_reduction({a1, a2}, {b1}, r, 1e-10)};
    }
    if (id == "ex2") {
        const int r = rng.uniform_int(1, 3);
        const Cx a(rng.uniform(0.2, 1.5), 0.0), b(rng.uniform(0.2, 1.5), 0.0);
        const Cx d(rng.uniform(-1.5, r - 1.3), 0.0);
        const Cx f(rng.uniform(0.6, 4.4), 0.0);
        if (!window_clear(a - b, -2, 2, band)) return std::nullopt;
        if (!window_clear(d, 1, r - 1, band)) return std::nullopt;
        if (!clear_nonpos(a + 2.0 - Cx(r, 0.0), band)) return std::nullopt;
        if (!clear_nonpos(a - d + 1.0, band)) return std::nullopt;
        if (std::abs(f - a) < band) return std::nullopt;
        P["a"] = a.real();
        P["b"] = b.real();
        P["d"] = d.real();
        P["f"] = f.real();
        P["r_int"] = r;
        return Drawn{P, example2_chain(a, b, d, f, r, utol)};
    }
    throw ConstraintViolation("unknown identity: " + id);
}

CaseRecord run_one(const std::string& id, int index, Rng& rng, const RunConfig& cfg) {
    CaseRecord rec;
    rec.index = index;
    rec.identity = id;
    rec.tol = cfg.rel_tol;
    std::string last = "GuardBand: no admissible draw";
    for (int attempt = 0; attempt < 100; ++attempt) {
        try {
            auto d = try_draw(id, rng, cfg);
            if (!d) continue;
            const Residual& r = d->res;
            rec.params = std::move(d->params);
            rec.lhs = r.lhs;
            rec.rhs = r.rhs;
            rec.abs_err = r.abs_err;
            rec.rel_err = r.rel_err;
            rec.terms_lhs = r.lhs_report.terms_used;
            rec.terms_rhs = r.rhs_report.terms_used;
            rec.converged = r.lhs_report.converged && r.rhs_report.converged;
            rec.flags = r.flags;
            if (!rec.converged) rec.flags.push_back("TermCapReached");
            rec.pass = rec.converged && rec.rel_err <= rec.tol;
            return rec;
        } catch (const ConstraintViolation& e) {
            last = std::string("ConstraintViolation: ") + e.what();
        } catch (const DegenerateNormalizer& e) {
            last = std::string("DegenerateNormalizer: ") + e.what();
        } catch (const BottomPole& e) {
            last = std::string("BottomPole: ") + e.what();
        } catch (const PoleError& e) {
            last = std::string("PoleError: ") + e.what();
        } catch (const MatchingFailure& e) {
            last = std::string("MatchingFailure: ") + e.what();
        } catch (const IdenticallyZero& e) {
            last = std::string("IdenticallyZero: ") + e.what();
        } catch (const IllConditioned& e) {
            last = std::string("IllConditioned: ") + e.what();
        } catch (const NonConvergent& e) {
            last = std::string("NonConvergent: ") + e.what();
        }
    }
    rec.params = json::object();
    rec.skipped = true;
    rec.pass = false;
    rec.flags = {"Skipped", last};
    return rec;
}

void finalize(RunReport& rep) {
    rep.count = static_cast<int>(rep.cases.size());
    rep.passed = rep.failed = rep.skipped = 0;
    std::vector<double> errs;
    for (const CaseRecord& c : rep.cases) {
        if (c.skipped) {
            ++rep.skipped;
            continue;
        }
        errs.push_back(c.rel_err);
        if (c.pass)
            ++rep.passed;
        else
            ++rep.failed;
    }
    rep.max_rel_err = rep.median_rel_err = 0.0;
    if (errs.empty()) return;
    std::sort(errs.begin(), errs.end());
    rep.max_rel_err = errs.back();
    const size_t n = errs.size();
    rep.median_rel_err = n % 2 == 1 ? errs[n / 2] : 0.5 * (errs[n / 2 - 1] + errs[n / 2]);
}

std::vector<std::string> resolve_identities(const RunConfig& cfg) {
    if (cfg.identities.empty()) return all_identities();
    std::vector<std::string> out;
    for (std::string name : cfg.identities) {
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        const auto& all = all_identities();
        if (std::find(all.begin(), all.end(), name) == all.end())
            throw ConstraintViolation("unknown identity: " + name);
        out.push_back(std::move(name));
    }
    return out;
}

struct TermCapGuard {
    long long saved = term_cap();
    ~TermCapGuard() { set_term_cap(saved); }
};

// ---------------------------------------------------------------------------
// golden corpus

double fact(int n) {
    double v = 1.0;
    for (int k = 2; k <= n; ++k) v *= k;
    return v;
}

EvalReport closed_report(Cx v) {
    EvalReport r;
    r.value = v;
    r.terms_used = 0;
    r.tail_bound = 0.0;
    r.converged = true;
    r.max_partial = std::abs(v);
    return r;
}

// (f)_2 (1-x)^a 3F2(a,b,f+2;b+2,f|x) against the two-term root form in
// y = x/(x-1); lambda1 = (f+b+1)/(f-b+1).
Residual golden_ex1_finite(Cx a, Cx b, Cx f, Cx x, double tol) {
    const Cx lam = (f + b + 1.0) / (f - b + 1.0);
    const Cx y = x / (x - 1.0);
    const EvalReport L = eval_series(HypSpec({a, b, f + 2.0}, {b + 2.0, f}), x, tol);
    const Cx lhs = pochhammer(f, 2) * std::pow(1.0 - x, a) * L.value;
    const EvalReport R = eval_series(HypSpec({a, Cx(1.0, 0.0), lam + 1.0}, {b + 2.0, lam}), y, tol);
    const Cx rhs = pochhammer(b, 2) + (pochhammer(f, 2) - pochhammer(b, 2)) * R.value;
    return make_residual(lhs, rhs, L, R);
}

// (e)_n (f)_2 / (e-d)_n 4F3(-n,b,d,f+2;b+2,e,f|1) against the same root
// form with the terminating upper parameter.
Residual golden_ex1_unit(int n, Cx b, Cx d, Cx e, Cx f, double tol) {
    const Cx lam = (f + b + 1.0) / (f - b + 1.0);
    const EvalReport L = eval_unit(HypSpec({Cx(-n, 0.0), b, d, f + 2.0}, {b + 2.0, e, f}), tol);
    const Cx lhs = pochhammer(e, n) * pochhammer(f, 2) / pochhammer(e - d, n) * L.value;
    const EvalReport R = eval_unit(
        HypSpec({Cx(-n, 0.0), Cx(1.0, 0.0), d, lam + 1.0}, {b + 2.0, 1.0 + d - e - Cx(n, 0.0), lam}),
        tol);
    const Cx rhs = pochhammer(b, 2) + (pochhammer(f, 2) - pochhammer(b, 2)) * R.value;
    return make_residual(lhs, rhs, L, R);
}

// General-c unit transformation for r = m = 1.
Residual golden_ex2_display0(Cx a, Cx b, Cx d, Cx f, Cx c, Cx e, double tol) {
    const Cx psi = c + e - a - b - d - 1.0;
    const Cx eta = (c - a - 1.0) * (c - b - 1.0) * f / (a * b + (c - a - b - 1.0) * f);
    const EvalReport L = eval_unit(HypSpec({a, b, d, f + 1.0}, {c, e, f}), tol);
    const EvalReport R =
        eval_unit(HypSpec({d, c - a - 1.0, c - b - 1.0, eta + 1.0}, {c, psi + d, eta}), tol);
    const Cx rhs = gamma_ratio({e, psi}, {e - d, psi + d}) * R.value;
    return make_residual(L.value, rhs, L, R);
}

// c = a+1 unit evaluation through the contiguous 3F2.
Residual golden_ex2_base(Cx a, Cx b, Cx d, Cx f, Cx e, double tol) {
    const EvalReport L = eval_unit(HypSpec({a, b, d, f + 1.0}, {a + 1.0, e, f}), tol);
    const EvalReport R = eval_unit(HypSpec({d, a - b, Cx(1.0, 0.0)}, {a + 1.0, e - b}), tol);
    const Cx K = b * (a - f) / ((a - b) * f);
    const Cx rhs = gamma_ratio({e, e - b - d}, {e - d, e - b}) * (1.0 - K * (1.0 - R.value));
    return make_residual(L.value, rhs, L, R);
}

Cx gamma2p(Cx a, Cx b, const IpdSpec& spec) {
    // Closed-form root for the second-kind reduced polynomial of Example 3/4
    // shape: -(m-1) + [a p1 - (a+m) p2] / [a p1/(a-b+1) - p2].
    const int m = spec.m_total();
    Cx p1(1.0, 0.0), p2(1.0, 0.0);
    const ParamVec fm = spec.f_plus_m();
    for (size_t j = 0; j < spec.f.size(); ++j) {
        p1 *= spec.f[j] - a - 1.0;
        p2 *= fm[j] - a - 1.0;
    }
    return Cx(1.0 - m, 0.0) + (a * p1 - (a + Cx(m, 0.0)) * p2) / (a * p1 / (a - b + 1.0) - p2);
}

// Second-kind two-term form with argument x for r = 1, m = 2 (c = a+2).
Residual golden_ex3_finite_main(Cx a, Cx b, Cx f, Cx x, double tol) {
    const Cx g = gamma2p(a, b, IpdSpec({f}, {2}));
    const EvalReport L = eval_series(HypSpec({a, b, f + 2.0}, {a + 2.0, f}), x, tol);
    const Cx lhs = std::pow(1.0 - x, b) * L.value;
    const EvalReport R =
        eval_series(HypSpec({Cx(1.0, 0.0), a - b + 1.0, g + 2.0}, {a + 3.0, g + 1.0}), x, tol);
    const Cx coef = x * b * (a * (f + 2.0) / ((a + 2.0) * f) - 1.0);
    return make_residual(lhs, 1.0 + coef * R.value, L, R);
}

Cx ex3_constant_a(Cx a, Cx b, Cx f) {
    Cx A(0.0, 0.0);
    for (int k = 0; k <= 2; ++k)
        A += binom(2, k) * pow_int(Cx(-1.0, 0.0), k) * pochhammer(a, k) * pochhammer(b, k) *
             pochhammer(-1.0 - a, 2 - k) /
             (pochhammer(f, k) * pochhammer(a - b, k) * pochhammer(b - a - 1.0, 2 - k));
    return A;
}

// Same identity re-summed around the constant A.
Residual golden_ex3_finite_alt(Cx a, Cx b, Cx f, Cx x, double tol) {
    const Cx g = gamma2p(a, b, IpdSpec({f}, {2}));
    const Cx A = ex3_constant_a(a, b, f);
    const EvalReport L = eval_series(HypSpec({a, b, f + 2.0}, {a + 2.0, f}), x, tol);
    const Cx lhs = std::pow(1.0 - x, b) * L.value;
    const EvalReport R =
        eval_series(HypSpec({a - b, Cx(1.0, 0.0), g + 1.0}, {a + 2.0, g}), x, tol);
    return make_residual(lhs, A + (1.0 - A) * R.value, L, R);
}

// Unit-argument 4F3 with c = a+2 against the two-term gamma form.
Residual golden_ex3_unit_main(Cx a, Cx b, Cx d, Cx f, Cx e, double tol) {
    const Cx g = gamma2p(a, b, IpdSpec({f}, {2}));
    const EvalReport L = eval_unit(HypSpec({a, b, d, f + 2.0}, {a + 2.0, e, f}), tol);
    const EvalReport R = eval_unit(
        HypSpec({Cx(1.0, 0.0), a - b + 1.0, d + 1.0, g + 2.0}, {a + 3.0, e - b + 1.0, g + 1.0}),
        tol);
    const Cx coef = b * d / (e - b) * (a * (f + 2.0) / ((a + 2.0) * f) - 1.0);
    const Cx rhs = gamma_ratio({e, e - b - d}, {e - d, e - b}) * (1.0 + coef * R.value);
    return make_residual(L.value, rhs, L, R);
}

Residual golden_ex3_unit_alt(Cx a, Cx b, Cx d, Cx f, Cx e, double tol) {
    const Cx g = gamma2p(a, b, IpdSpec({f}, {2}));
    const Cx A = ex3_constant_a(a, b, f);
    const EvalReport L = eval_unit(HypSpec({a, b, d, f + 2.0}, {a + 2.0, e, f}), tol);
    const EvalReport R =
        eval_unit(HypSpec({d, a - b, Cx(1.0, 0.0), g + 1.0}, {a + 2.0, e - b, g}), tol);
    const Cx rhs = gamma_ratio({e, e - b - d}, {e - d, e - b}) * (A + (1.0 - A) * R.value);
    return make_residual(L.value, rhs, L, R);
}

// e = b+1 closed evaluation of the unit 4F3.
Residual golden_ex3_eb1(Cx a, Cx b, Cx d, Cx f, double tol) {
    const Cx g = gamma2p(a, b, IpdSpec({f}, {2}));
    const Cx A = ex3_constant_a(a, b, f);
    const EvalReport L = eval_unit(HypSpec({a, b, d, f + 2.0}, {a + 2.0, b + 1.0, f}), tol);
    const Cx inner = gamma_ratio({a + 2.0, b - d + 2.0}, {b + 2.0, a - d + 2.0}) *
                     (1.0 - d * (a - b) / (g * (d - b - 1.0)));
    const Cx rhs = gamma_ratio({b + 1.0, 1.0 - d}, {b + 1.0 - d}) * (A + (1.0 - A) * inner);
    return make_residual(L.value, rhs, L, closed_report(rhs));
}

// e = b+2 closed evaluation.
Residual golden_ex3_eb2(Cx a, Cx b, Cx d, Cx f, double tol) {
    const Cx g = gamma2p(a, b, IpdSpec({f}, {2}));
    const Cx A = ex3_constant_a(a, b, f);
    const EvalReport L = eval_unit(HypSpec({a, b, d, f + 2.0}, {a + 2.0, b + 2.0, f}), tol);
    const Cx brace = gamma_ratio({a + 1.0, b - d + 3.0}, {b + 2.0, a - d + 2.0}) *
                         (1.0 - (d - 1.0) * (a - b - 1.0) / ((g - 1.0) * (d - b - 2.0))) -
                     1.0;
    const Cx rhs = gamma_ratio({b + 2.0, 2.0 - d}, {b - d + 2.0}) *
                   (A + (1.0 - A) * (a + 1.0) * (g - 1.0) / (g * (d - 1.0) * (a - b - 1.0)) * brace);
    return make_residual(L.value, rhs, L, closed_report(rhs));
}

// Exponential-weight form for r = 3, m = (1,1,2), q = 2.
Residual golden_ex4_kummer(Cx b, Cx f1, Cx f2, Cx f3, Cx x, double tol) {
    const EvalReport L = eval_series(
        HypSpec({b, f1 + 1.0, f2 + 1.0, f3 + 2.0}, {b + 2.0, f1, f2, f3}), x, tol);
    const Cx lhs = std::exp(-x) * L.value;
    Cx head(0.0, 0.0);
    for (int j = 0; j <= 2; ++j) {
        const EvalReport F = eval_unit(
            HypSpec({Cx(-j, 0.0), b, f1 + 1.0, f2 + 1.0, f3 + 2.0}, {b + 2.0, f1, f2, f3}), tol);
        head += pow_int(-x, j) / fact(j) * F.value;
    }
    const Cx B = ((b + 4.0) * (f1 - b) * (f2 - b) * pochhammer(f3 - b, 2) -
                  b * (f1 - b - 1.0) * (f2 - b - 1.0) * pochhammer(f3 - b - 1.0, 2)) /
                 (pochhammer(b + 2.0, 3) * f1 * f2 * f3 * (f3 + 1.0));
    const Cx lam = 1.0 + b - b * (f1 - b - 1.0) * (f2 - b - 1.0) * (f3 - b - 1.0) /
                             ((f1 - b) * (f2 - b) * (f3 - b + 1.0));
    const EvalReport R =
        eval_series(HypSpec({Cx(1.0, 0.0), lam + 4.0}, {b + 5.0, lam + 3.0}), -x, tol);
    const Cx rhs = head + pow_int(-x, 3) * B * R.value;
    return make_residual(lhs, rhs, L, R);
}

// Unit-argument 6F5 for the same parameter block; the root gamma and the
// linear-bracket constant come from the second-kind reduced polynomial.
Residual golden_ex4_65(Cx a, Cx b, Cx d, Cx e, Cx f1, Cx f2, Cx f3, double tol) {
    const IpdSpec spec({f1, f2, f3}, {1, 1, 2});
    const EvalReport L = eval_unit(
        HypSpec({a, b, d, f1 + 1.0, f2 + 1.0, f3 + 2.0}, {a + 2.0, e, f1, f2, f3}), tol);

    auto f43 = [&](int k) {
        // 4F3(-k, f1+1, f2+1, f3+2; f1, f2, f3 | 1), k <= 2
        Cx sum(0.0, 0.0), term(1.0, 0.0);
        for (int t = 0; t <= k; ++t) {
            sum += term;
            if (t == k) break;
            term *= Cx(-k + t, 0.0) * (f1 + 1.0 + Cx(t, 0.0)) * (f2 + 1.0 + Cx(t, 0.0)) *
                    (f3 + 2.0 + Cx(t, 0.0)) /
                    ((f1 + Cx(t, 0.0)) * (f2 + Cx(t, 0.0)) * (f3 + Cx(t, 0.0)) * Cx(t + 1, 0.0));
        }
        return sum;
    };
    auto f32 = [&](int k, int j) {
        // 3F2(k-4, k-j, -b-2; k-2, a-b-2+k | 1), terminating at j-k
        Cx sum(0.0, 0.0), term(1.0, 0.0);
        for (int t = 0; t <= j - k; ++t) {
            sum += term;
            if (t == j - k) break;
            term *= Cx(k - 4 + t, 0.0) * Cx(k - j + t, 0.0) * (-b - 2.0 + Cx(t, 0.0)) /
                    (Cx(k - 2 + t, 0.0) * (a - b - 2.0 + Cx(k + t, 0.0)) * Cx(t + 1, 0.0));
        }
        return sum;
    };

    Cx B1(0.0, 0.0);
    for (int j = 0; j <= 2; ++j) {
        const Cx outer = pochhammer(Cx(-2.0, 0.0), j) * pochhammer(a - b - 2.0, j) *
                         pochhammer(d, j) /
                         (pochhammer(a + 2.0, j) * pochhammer(e - b - 2.0, j) * fact(j));
        Cx inner(0.0, 0.0);
        for (int k = 0; k <= j; ++k)
            inner += pochhammer(Cx(-j, 0.0), k) * pochhammer(a, k) * pochhammer(b, k) /
                     (pochhammer(Cx(-2.0, 0.0), k) * pochhammer(a - b - 2.0, k) * fact(k)) *
                     f43(k) * f32(k, j);
        B1 += outer * inner;
    }
    B1 *= gamma_ratio({e, e - b - d - 2.0}, {e - d, e - b - 2.0});

    const Cx w = (a + 4.0) * pochhammer_ipd(spec, -a) - a * pochhammer_ipd(spec, -a - 1.0);
    const Cx B2 = gamma_ratio({e, e - b - d - 2.0}, {e - d, e - b + 1.0}) * pochhammer(d, 3) *
                  pochhammer(b, 3) * w / (pochhammer(a + 2.0, 3) * pochhammer_ipd(spec, Cx(0.0, 0.0)));

    const Cx g = gamma2p(a, b, spec);
    const EvalReport R = eval_unit(
        HypSpec({Cx(1.0, 0.0), a - b + 1.0, d + 3.0, g + 4.0}, {a + 5.0, e - b + 1.0, g + 3.0}),
        tol);
    return make_residual(L.value, B1 - B2 * R.value, L, R);
}

void golden_add(RunReport& rep, const char* name, json params, const Residual& r, double tol) {
    CaseRecord rec;
    rec.index = static_cast<int>(rep.cases.size());
    rec.identity = name;
    rec.params = std::move(params);
    rec.lhs = r.lhs;
    rec.rhs = r.rhs;
    rec.abs_err = r.abs_err;
    rec.rel_err = r.rel_err;
    rec.tol = tol;
    rec.terms_lhs = r.lhs_report.terms_used;
    rec.terms_rhs = r.rhs_report.terms_used;
    rec.converged = r.lhs_report.converged && r.rhs_report.converged;
    rec.flags = r.flags;
    rec.skipped = false;
    rec.pass = rec.converged && rec.rel_err <= tol;
    rep.cases.push_back(std::move(rec));
}

}  // namespace

// ---------------------------------------------------------------------------
// public entry points

const std::vector<std::string>& all_identities() {
    static const std::vector<std::string> names = {
        "mp1",   "mp2",   "mp3",     "thm1",    "thm2",   "thm3",    "cor1a",
        "cor1b", "cor2",  "cor2alt", "cor3a",   "cor3b",  "cor4",    "cor5a",
        "cor5b", "cor6",  "intro_a", "intro_b", "limit_m1",
        "thm4",  "thm5",  "thm6",    "cor7a",   "cor7b",  "red_lemma", "ex2",
        "ex3_sum", "ex4"};
    return names;
}

void validate_config(const RunConfig& cfg) {
    if (cfg.draws < 1) throw ConstraintViolation("draws must be >= 1");
    if (!(cfg.x_box > 0.0) || !(cfg.x_box < 0.5))
        throw ConstraintViolation("x_box must satisfy 0 < x_box < 0.5");
    if (!(cfg.guard_band > 0.0)) throw ConstraintViolation("guard_band must be positive");
    if (!(cfg.rel_tol > 0.0)) throw ConstraintViolation("rel_tol must be positive");
    if (cfg.r_max < 1) throw ConstraintViolation("r_max must be >= 1");
    if (cfg.m_total_max < cfg.r_max)
        throw ConstraintViolation("m_total_max must be >= r_max");
    if (cfg.term_cap < 1) throw ConstraintViolation("term_cap must be >= 1");
    resolve_identities(cfg);
}

RunReport run_check(const RunConfig& cfg) {
    validate_config(cfg);
    const std::vector<std::string> ids = resolve_identities(cfg);
    TermCapGuard guard;
    set_term_cap(effective_term_cap(cfg.term_cap));
    RunReport rep;
    int index = 0;
    for (const std::string& id : ids) {
        Rng rng = Rng::stream(cfg.seed, id);
        for (int dnum = 0; dnum < cfg.draws; ++dnum)
            rep.cases.push_back(run_one(id, index++, rng, cfg));
    }
    finalize(rep);
    return rep;
}

RunReport run_golden() {
    RunReport rep;
    const double ft = 1e-12;  // finite-argument / terminating stopping tolerance
    const double ut = 5e-8;   // unit-argument stopping tolerance
    const double tol_fin = 1e-8, tol_unit = 1e-6;

    struct E1F {
        double a, b, f, x;
    };
    for (const E1F& c : {E1F{0.4, 0.7, 3.0, 0.3}, E1F{-0.6, 0.35, 1.8, -0.25},
                         E1F{0.9, 1.1, 2.6, 0.15}})
        golden_add(rep, "ex1_finite", {{"a", c.a}, {"b", c.b}, {"f", c.f}, {"x", c.x}},
                   golden_ex1_finite(Cx(c.a, 0.0), Cx(c.b, 0.0), Cx(c.f, 0.0), Cx(c.x, 0.0), ft),
                   tol_fin);

    struct E1U {
        int n;
        double b, d, e, f;
    };
    for (const E1U& c : {E1U{2, 0.9, 0.35, 2.7, 1.9}, E1U{3, 0.6, -0.4, 1.9, 2.4},
                         E1U{5, 1.3, 0.8, 3.6, 3.1}})
        golden_add(rep, "ex1_unit",
                   {{"n", c.n}, {"b", c.b}, {"d", c.d}, {"e", c.e}, {"f", c.f}},
                   golden_ex1_unit(c.n, Cx(c.b, 0.0), Cx(c.d, 0.0), Cx(c.e, 0.0), Cx(c.f, 0.0), ft),
                   tol_fin);

    struct E2D {
        double a, b, d, f, c, e;
    };
    for (const E2D& c : {E2D{0.5, 0.3, 0.4, 1.2, 2.2, 3.8}, E2D{0.8, 0.45, -0.6, 2.0, 2.6, 3.1},
                         E2D{1.1, 0.7, 0.9, 1.5, 3.0, 4.2}})
        golden_add(rep, "ex2_display0",
                   {{"a", c.a}, {"b", c.b}, {"d", c.d}, {"f", c.f}, {"c", c.c}, {"e", c.e}},
                   golden_ex2_display0(Cx(c.a, 0.0), Cx(c.b, 0.0), Cx(c.d, 0.0), Cx(c.f, 0.0),
                                       Cx(c.c, 0.0), Cx(c.e, 0.0), ut),
                   tol_unit);

    struct E2B {
        double a, b, d, f, e;
    };
    for (const E2B& c : {E2B{0.62, 0.85, -0.4, 1.9, 2.8}, E2B{1.2, 0.4, 0.55, 2.8, 3.4},
                         E2B{0.3, 1.05, 0.2, 0.9, 2.9}})
        golden_add(rep, "ex2_base",
                   {{"a", c.a}, {"b", c.b}, {"d", c.d}, {"f", c.f}, {"e", c.e}},
                   golden_ex2_base(Cx(c.a, 0.0), Cx(c.b, 0.0), Cx(c.d, 0.0), Cx(c.f, 0.0),
                                   Cx(c.e, 0.0), ut),
                   tol_unit);

    struct E2C {
        double a, b, d, f;
        int r;
    };
    for (const E2C& c : {E2C{0.62, 0.85, -0.4, 1.9, 1}, E2C{0.95, 0.4, 0.15, 2.6, 2},
                         E2C{1.15, 0.5, 0.3, 2.4, 3}})
        golden_add(rep, "ex2_chain",
                   {{"a", c.a}, {"b", c.b}, {"d", c.d}, {"f", c.f}, {"r_int", c.r}},
                   example2_chain(Cx(c.a, 0.0), Cx(c.b, 0.0), Cx(c.d, 0.0), Cx(c.f, 0.0), c.r, ut),
                   tol_unit);

    struct E3F {
        double a, b, f, x;
    };
    const std::array<E3F, 3> e3f = {E3F{0.41, 0.73, 1.8, 0.3}, E3F{0.9, 0.45, 2.6, -0.35},
                                    E3F{1.2, 0.55, 3.4, 0.2}};
    for (const E3F& c : e3f)
        golden_add(rep, "ex3_finite_main", {{"a", c.a}, {"b", c.b}, {"f", c.f}, {"x", c.x}},
                   golden_ex3_finite_main(Cx(c.a, 0.0), Cx(c.b, 0.0), Cx(c.f, 0.0), Cx(c.x, 0.0), ft),
                   tol_fin);
    for (const E3F& c : e3f)
        golden_add(rep, "ex3_finite_alt", {{"a", c.a}, {"b", c.b}, {"f", c.f}, {"x", c.x}},
                   golden_ex3_finite_alt(Cx(c.a, 0.0), Cx(c.b, 0.0), Cx(c.f, 0.0), Cx(c.x, 0.0), ft),
                   tol_fin);

    struct E3U {
        double a, b, d, f, e;
    };
    const std::array<E3U, 3> e3u = {E3U{0.41, 0.73, 0.6, 1.8, 3.0}, E3U{0.9, 0.45, -0.8, 2.6, 1.9},
                                    E3U{1.2, 0.55, 0.35, 3.4, 3.3}};
    for (const E3U& c : e3u)
        golden_add(rep, "ex3_unit_main",
                   {{"a", c.a}, {"b", c.b}, {"d", c.d}, {"f", c.f}, {"e", c.e}},
                   golden_ex3_unit_main(Cx(c.a, 0.0), Cx(c.b, 0.0), Cx(c.d, 0.0), Cx(c.f, 0.0),
                                        Cx(c.e, 0.0), ut),
                   tol_unit);
    for (const E3U& c : e3u)
        golden_add(rep, "ex3_unit_alt",
                   {{"a", c.a}, {"b", c.b}, {"d", c.d}, {"f", c.f}, {"e", c.e}},
                   golden_ex3_unit_alt(Cx(c.a, 0.0), Cx(c.b, 0.0), Cx(c.d, 0.0), Cx(c.f, 0.0),
                                       Cx(c.e, 0.0), ut),
                   tol_unit);

    struct E3S {
        double a, b, d, f;
    };
    for (const E3S& c : {E3S{0.41, 0.73, -1.3, 1.8}, E3S{0.9, 0.45, -1.8, 2.6},
                         E3S{1.2, 0.55, -1.05, 3.4}})
        golden_add(rep, "ex3_eb1", {{"a", c.a}, {"b", c.b}, {"d", c.d}, {"f", c.f}},
                   golden_ex3_eb1(Cx(c.a, 0.0), Cx(c.b, 0.0), Cx(c.d, 0.0), Cx(c.f, 0.0), ut),
                   tol_unit);
    for (const E3S& c : {E3S{0.41, 0.73, -1.3, 1.8}, E3S{0.9, 0.45, -0.4, 2.6},
                         E3S{1.2, 0.55, -0.85, 3.4}})
        golden_add(rep, "ex3_eb2", {{"a", c.a}, {"b", c.b}, {"d", c.d}, {"f", c.f}},
                   golden_ex3_eb2(Cx(c.a, 0.0), Cx(c.b, 0.0), Cx(c.d, 0.0), Cx(c.f, 0.0), ut),
                   tol_unit);

    struct E4K {
        double b, f1, f2, f3, x;
    };
    for (const E4K& c : {E4K{0.9, 1.6, 2.3, 3.1, 0.7}, E4K{0.55, 2.2, 1.3, 2.9, -0.8},
                         E4K{1.15, 3.0, 1.9, 2.2, 1.1}})
        golden_add(rep, "ex4_kummer",
                   {{"b", c.b}, {"f1", c.f1}, {"f2", c.f2}, {"f3", c.f3}, {"x", c.x}},
                   golden_ex4_kummer(Cx(c.b, 0.0), Cx(c.f1, 0.0), Cx(c.f2, 0.0), Cx(c.f3, 0.0),
                                     Cx(c.x, 0.0), ft),
                   tol_fin);

    struct E4U {
        double a, b, d, e, f1, f2, f3;
    };
    for (const E4U& c : {E4U{0.52, 0.31, 0.4, 4.71, 1.3, 2.2, 3.4},
                         E4U{0.8, 0.5, 0.3, 5.2, 1.7, 2.6, 2.9},
                         E4U{0.35, 0.6, 0.55, 5.0, 2.1, 1.6, 3.3}})
        golden_add(rep, "ex4_65",
                   {{"a", c.a},
                    {"b", c.b},
                    {"d", c.d},
                    {"e", c.e},
                    {"f1", c.f1},
                    {"f2", c.f2},
                    {"f3", c.f3}},
                   golden_ex4_65(Cx(c.a, 0.0), Cx(c.b, 0.0), Cx(c.d, 0.0), Cx(c.e, 0.0),
                                 Cx(c.f1, 0.0), Cx(c.f2, 0.0), Cx(c.f3, 0.0), ut),
                   tol_unit);

    finalize(rep);
    return rep;
}

int report_exit_code(const RunReport& rep) { return rep.failed > 0 ? 1 : 0; }

// ---------------------------------------------------------------------------
// config parsing

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

template <typename T>
T parse_number(const std::string& value, const char* key) {
    T out{};
    const std::string v = trim(value);
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConstraintViolation(std::string("invalid value for config key ") + key + ": " + value);
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConstraintViolation("config line " + std::to_string(lineno) +
                                      " is not of the form key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "seed")
            cfg.seed = parse_number<std::uint64_t>(value, "seed");
        else if (key == "draws")
            cfg.draws = parse_number<int>(value, "draws");
        else if (key == "r_max")
            cfg.r_max = parse_number<int>(value, "r_max");
        else if (key == "m_total_max")
            cfg.m_total_max = parse_number<int>(value, "m_total_max");
        else if (key == "x_box")
            cfg.x_box = parse_number<double>(value, "x_box");
        else if (key == "guard_band")
            cfg.guard_band = parse_number<double>(value, "guard_band");
        else if (key == "rel_tol")
            cfg.rel_tol = parse_number<double>(value, "rel_tol");
        else if (key == "term_cap")
            cfg.term_cap = parse_number<long long>(value, "term_cap");
        else if (key == "identities") {
            cfg.identities.clear();
            std::istringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (!item.empty()) cfg.identities.push_back(item);
            }
        } else {
            throw ConstraintViolation("unknown config key: " + key);
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConstraintViolation("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

long long effective_term_cap(long long configured) {
    const char* env = std::getenv("HYPID_TERM_CAP");
    if (env == nullptr) return configured;
    long long v = 0;
    const std::string s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v < 1)
        throw ConstraintViolation("HYPID_TERM_CAP must be a positive integer");
    return v;
}

// ---------------------------------------------------------------------------
// report rendering

nlohmann::json config_json(const RunConfig& cfg, long long effective_cap) {
    json j;
    j["seed"] = cfg.seed;
    j["draws"] = cfg.draws;
    j["r_max"] = cfg.r_max;
    j["m_total_max"] = cfg.m_total_max;
    j["x_box"] = cfg.x_box;
    j["guard_band"] = cfg.guard_band;
    j["rel_tol"] = cfg.rel_tol;
    j["term_cap"] = cfg.term_cap;
    j["term_cap_effective"] = effective_cap;
    j["identities"] = resolve_identities(cfg);
    return j;
}

std::string render_report_jsonl(const RunReport& rep, const nlohmann::json& header) {
    std::string out = header.dump();
    out += '\n';
    for (const CaseRecord& c : rep.cases) {
        json j;
        j["case"] = c.index;
        j["identity"] = c.identity;
        j["params"] = c.params;
        j["lhs"] = jcx(c.lhs);
        j["rhs"] = jcx(c.rhs);
        j["abs_err"] = c.abs_err;
        j["rel_err"] = c.rel_err;
        j["tol"] = c.tol;
        j["terms_used"] = json::array({c.terms_lhs, c.terms_rhs});
        j["converged"] = c.converged;
        j["flags"] = c.flags;
        j["skipped"] = c.skipped;
        j["pass"] = c.pass;
        out += j.dump();
        out += '\n';
    }
    json s;
    s["summary"] = {{"count", rep.count},
                    {"pass", rep.passed},
                    {"fail", rep.failed},
                    {"skipped", rep.skipped},
                    {"max_rel_err", rep.max_rel_err},
                    {"median_rel_err", rep.median_rel_err}};
    out += s.dump();
    out += '\n';
    return out;
}

std::string render_report_csv(const RunReport& rep) {
    std::string out = "case,identity,pass,skipped,converged,rel_err,terms_lhs,terms_rhs,flags\n";
    for (const CaseRecord& c : rep.cases) {
        out += std::to_string(c.index);
        out += ',';
        out += c.identity;
        out += ',';
        out += c.pass ? "true" : "false";
        out += ',';
        out += c.skipped ? "true" : "false";
        out += ',';
        out += c.converged ? "true" : "false";
        out += ',';
        out += fmt_double(c.rel_err);
        out += ',';
        out += std::to_string(c.terms_lhs);
        out += ',';
        out += std::to_string(c.terms_rhs);
        out += ',';
        for (size_t i = 0; i < c.flags.size(); ++i) {
            if (i) out += '|';
            out += c.flags[i];
        }
        out += '\n';
    }
    out += "# summary count=" + std::to_string(rep.count) + " pass=" + std::to_string(rep.passed) +
           " fail=" + std::to_string(rep.failed) + " skipped=" + std::to_string(rep.skipped) +
           " max_rel_err=" + fmt_double(rep.max_rel_err) +
           " median_rel_err=" + fmt_double(rep.median_rel_err) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// eval expression

namespace {

struct ExprCursor {
    const std::string& s;
    size_t pos = 0;
    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= s.size();
    }
    double number(const char* what) {
        skip_ws();
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
        if (ec != std::errc())
            throw ParseError(std::string("expected a number for ") + what,
                             static_cast<long>(pos) + 1);
        pos = static_cast<size_t>(p - s.data());
        return v;
    }
    ParamVec list(const char* what) {
        ParamVec out;
        skip_ws();
        if (pos >= s.size() || s[pos] == ';') return out;  // empty list
        for (;;) {
            out.push_back(Cx(number(what), 0.0));
            skip_ws();
            if (pos < s.size() && s[pos] == ',') {
                ++pos;
                continue;
            }
            return out;
        }
    }
    void expect_semi(const char* after) {
        skip_ws();
        if (pos >= s.size() || s[pos] != ';')
            throw ParseError(std::string("expected ';' after ") + after,
                             static_cast<long>(pos) + 1);
        ++pos;
    }
};

}  // namespace

EvalRequest parse_eval_expr(const std::string& expr) {
    ExprCursor cur{expr};
    EvalRequest req;
    req.top = cur.list("a top parameter");
    cur.expect_semi("the top parameter list");
    req.bottom = cur.list("a bottom parameter");
    cur.expect_semi("the bottom parameter list");
    req.x = Cx(cur.number("the argument x"), 0.0);
    if (!cur.at_end())
        throw ParseError("unexpected trailing characters", static_cast<long>(cur.pos) + 1);
    return req;
}

std::string format_eval(const EvalRequest& req, double rel_tol) {
    const EvalReport r = eval_series(HypSpec(req.top, req.bottom), req.x, rel_tol);
    std::string out;
    out += "value = " + fmt_cx(r.value) + "\n";
    out += "terms_used = " + std::to_string(r.terms_used) + "\n";
    out += "tail_bound = " + fmt_double(r.tail_bound) + "\n";
    out += std::string("converged = ") + (r.converged ? "true" : "false") + "\n";
    out += "max_partial = " + fmt_double(r.max_partial) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// limit studies

LimitStudy run_limits(const LimitsRequest& req) {
    if (req.lemma != 1 && req.lemma != 2)
        throw ConstraintViolation("lemma must be 1 or 2");
    if (req.spec.r() < 1) throw ConstraintViolation("the parameter block must be non-empty");
    const int m = req.spec.m_total();
    if (req.q < 0 || req.q > m - 1)
        throw ConstraintViolation("q must lie in [0, m_total - 1]");
    std::vector<double> eps = req.eps.empty() ? std::vector<double>{1e-3, 1e-4, 1e-5} : req.eps;
    if (req.lemma == 1) {
        const Cx c_base = req.b + Cx(m - req.q, 0.0);
        return lemma1_limit_study(req.b, c_base, req.spec, req.q, eps);
    }
    const Cx c_base = req.a + Cx(m - req.q, 0.0);
    return lemma2_limit_study(req.a, req.b, c_base, req.spec, req.q, eps);
}

namespace {

json limits_params_json(const LimitsRequest& req) {
    json p;
    p["lemma"] = req.lemma;
    if (req.lemma == 2) p["a"] = req.a.real();
    p["b"] = req.b.real();
    json f = json::array(), m = json::array();
    for (const Cx& z : req.spec.f) f.push_back(z.real());
    for (int mi : req.spec.m) m.push_back(mi);
    p["f"] = f;
    p["m"] = m;
    p["q"] = req.q;
    return p;
}

}  // namespace

std::string render_limits_csv(const LimitsRequest& req, const LimitStudy& st) {
    (void)req;
    std::string out = "eps,field,index,re,im\n";
    for (size_t i = 0; i < st.eps.size(); ++i) {
        const std::string e = fmt_double(st.eps[i]);
        for (size_t k = 0; k < st.predicted.size(); ++k) {
            out += e + ",predicted," + std::to_string(k) + ',' + fmt_double(st.predicted[k].real()) +
                   ',' + fmt_double(st.predicted[k].imag()) + '\n';
            const Cx z = st.perturbed_roots[i][k];
            out += e + ",perturbed," + std::to_string(k) + ',' + fmt_double(z.real()) + ',' +
                   fmt_double(z.imag()) + '\n';
        }
        out += e + ",match_err,," + fmt_double(st.match_err[i]) + ",\n";
        out += e + ",ratio,," + fmt_double(st.ratio[i].real()) + ',' +
               fmt_double(st.ratio[i].imag()) + '\n';
    }
    out += ",predicted_ratio,," + fmt_double(st.predicted_ratio.real()) + ',' +
           fmt_double(st.predicted_ratio.imag()) + '\n';
    out += ",extrapolated_ratio,," + fmt_double(st.extrapolated_ratio.real()) + ',' +
           fmt_double(st.extrapolated_ratio.imag()) + '\n';
    out += ",slope,," + fmt_double(st.slope) + ",\n";
    return out;
}

std::string render_limits_json(const LimitsRequest& req, const LimitStudy& st) {
    json j;
    j["params"] = limits_params_json(req);
    j["eps"] = st.eps;
    json pred = json::array();
    for (const Cx& z : st.predicted) pred.push_back(jcx(z));
    j["predicted"] = pred;
    json pert = json::array();
    for (const ParamVec& row : st.perturbed_roots) {
        json jr = json::array();
        for (const Cx& z : row) jr.push_back(jcx(z));
        pert.push_back(jr);
    }
    j["perturbed_roots"] = pert;
    j["match_err"] = st.match_err;
    json ratio = json::array();
    for (const Cx& z : st.ratio) ratio.push_back(jcx(z));
    j["ratio"] = ratio;
    j["predicted_ratio"] = jcx(st.predicted_ratio);
    j["extrapolated_ratio"] = jcx(st.extrapolated_ratio);
    j["slope"] = st.slope;
    std::string out = j.dump();
    out += '\n';
    return out;
}

}  // namespace hypid
