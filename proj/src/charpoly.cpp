#include "hypid/charpoly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>

namespace hypid {

namespace {

constexpr double kTrimRel = 1e-12;       // coefficient trim / zero test, relative to scale
constexpr double kDualFormTol = 1e-10;   // agreement bound for redundant closed forms
constexpr double kResidualTol = 1e-8;    // relative backward error accepted for roots
constexpr double kMatchBound = 0.45;     // farther than this from every limit is a failure

double fact(int n) {
    double v = 1.0;
    for (int i = 2; i <= n; ++i) v *= i;
    return v;
}

double neg1pow(int k) { return (k & 1) ? -1.0 : 1.0; }

bool lex_less(const Cx& u, const Cx& v) {
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
}

// Coefficient accumulator that tracks, per coefficient, the sum of absolute
// contributions. The maximum of those sums is the assembly scale used for
// trimming and the identically-zero decision.
struct Accum {
    ParamVec c;
    std::vector<double> mag;
    explicit Accum(int ncoeffs) : c(ncoeffs, Cx(0.0)), mag(ncoeffs, 0.0) {}
    void add(const ParamVec& p, Cx w) {
        double aw = std::abs(w);
        for (std::size_t j = 0; j < p.size(); ++j) {
            c[j] += w * p[j];
            mag[j] += aw * std::abs(p[j]);
        }
    }
    double scale() const {
        double s = 0.0;
        for (double v : mag) s = std::max(s, v);
        return s;
    }
};

// p(t) * (alpha + beta t), ascending coefficients.
ParamVec mul_linear(const ParamVec& p, Cx alpha, Cx beta) {
    ParamVec q(p.size() + 1, Cx(0.0));
    for (std::size_t j = 0; j < p.size(); ++j) {
        q[j] += alpha * p[j];
        q[j + 1] += beta * p[j];
    }
    return q;
}

// Terminating pFq at unit argument, exactly N+1 terms. Returns the sum and
// the sum of term magnitudes (cancellation scale).
std::pair<Cx, double> unit_terminating(const ParamVec& top, const ParamVec& bot, int N) {
    Cx term = 1.0, sum = 1.0;
    double mag = 1.0;
    for (int i = 0; i < N; ++i) {
        Cx num = 1.0, den = double(i + 1);
        for (const Cx& t : top) num *= t + double(i);
        for (const Cx& b : bot) den *= b + double(i);
        term *= num / den;
        sum += term;
        mag += std::abs(term);
    }
    return {sum, mag};
}

// All C_{0..m} in one sweep (each entry still runs the dual-form check).
ParamVec ckr_all(const IpdSpec& spec) {
    ParamVec out(spec.m_total() + 1);
    for (int k = 0; k <= spec.m_total(); ++k) out[k] = ckr(k, spec);
    return out;
}

void check_q_range(int q, const IpdSpec& spec) {
    if (q < 0 || q > spec.m_total() - 1)
        throw ConstraintViolation("q must lie in [0, m_total-1]");
}

void check_ab_difference(Cx a, Cx b, int q, const IpdSpec& spec) {
    int m = spec.m_total();
    for (int j = q + 1 - m; j <= q; ++j)
        if (std::abs(a - b - double(j)) <= kIntSnapTol)
            throw ConstraintViolation("a-b collides with the prohibited integer window");
}

// Defining sum behind qmhat_poly, with its cancellation scale.
std::pair<Cx, double> qmhat_direct(Cx a, Cx b, Cx c, const IpdSpec& spec, Cx t,
                                   const ParamVec& C) {
    int m = spec.m_total();
    Cx sum = 0.0;
    double mag = 0.0;
    for (int k = 0; k <= m; ++k) {
        Cx pref = neg1pow(k) * C[k] * pochhammer(a, k) * pochhammer(b, k) * pochhammer(t, k) /
                  (pochhammer(c - a - double(m), k) * pochhammer(c - b - double(m), k));
        auto inner = unit_terminating({Cx(double(k - m)), t + double(k), c - a - b - double(m)},
                                      {c - a - double(m) + double(k), c - b - double(m) + double(k)},
                                      m - k);
        sum += pref * inner.first;
        mag += std::abs(pref) * inner.second;
    }
    return {sum, mag};
}

// Defining double sum behind rhat_poly, with its cancellation scale.
std::pair<Cx, double> rhat_direct(Cx a, Cx b, const IpdSpec& spec, int q, Cx t,
                                  const ParamVec& C) {
    int m = spec.m_total();
    Cx sum = 0.0;
    double mag = 0.0;
    Cx pref0 = pochhammer(b, q + 1) / pochhammer(b - a, q + 1);
    for (int k = 0; k <= q; ++k) {
        Cx w = pref0 * pochhammer(Cx(double(k - m)), q - k + 1) * pochhammer(a, k) * C[k] /
               fact(q - k + 1);
        auto inner = unit_terminating({Cx(double(1 - m + q)), t + double(q + 1), 1.0 - b - double(k)},
                                      {a - b + 1.0, Cx(double(2 - k + q))},
                                      m - q - 1);
        sum += w * inner.first;
        mag += std::abs(w) * inner.second;
    }
    for (int k = q + 1; k <= m; ++k) {
        Cx w = neg1pow(k) * pochhammer(a, k) * pochhammer(b, k) * C[k] *
               pochhammer(t + double(q + 1), k - q - 1) /
               (pochhammer(a - b - double(q), k) * fact(k - q - 1));
        auto inner = unit_terminating({Cx(double(k - m)), t + double(k), -b - double(q)},
                                      {a - b - double(q) + double(k), Cx(double(k - q))},
                                      m - k);
        sum += w * inner.first;
        mag += std::abs(w) * inner.second;
    }
    return {sum, mag};
}

// Monomial coefficients through the integer nodes 0..n-1 (Vandermonde solve,
// partial pivoting; n <= m_total+1 so conditioning is benign).
ParamVec interpolate_at_integers(const ParamVec& values) {
    int n = static_cast<int>(values.size());
    std::vector<ParamVec> A(n, ParamVec(n));
    ParamVec rhs = values;
    for (int i = 0; i < n; ++i) {
        double x = double(i), xp = 1.0;
        for (int j = 0; j < n; ++j) {
            A[i][j] = xp;
            xp *= x;
        }
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int i = col + 1; i < n; ++i)
            if (std::abs(A[i][col]) > std::abs(A[piv][col])) piv = i;
        std::swap(A[col], A[piv]);
        std::swap(rhs[col], rhs[piv]);
        for (int i = col + 1; i < n; ++i) {
            Cx fcr = A[i][col] / A[col][col];
            for (int j = col; j < n; ++j) A[i][j] -= fcr * A[col][j];
            rhs[i] -= fcr * rhs[col];
        }
    }
    ParamVec x(n);
    for (int i = n - 1; i >= 0; --i) {
        Cx s = rhs[i];
        for (int j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

// Pair each root with a distinct predicted limit: nearest-neighbour first,
// exhaustive minimum-total-distance when the greedy picks collide (degree
// caps keep the permutation count at 720 or less).
std::vector<int> match_roots(const ParamVec& rts, const ParamVec& pred) {
    int n = static_cast<int>(pred.size());
    std::vector<int> pick(n, -1);
    std::vector<bool> used(n, false);
    bool clash = false;
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            double d = std::abs(rts[i] - pred[j]);
            if (d < bd) { bd = d; best = j; }
        }
        pick[i] = best;
        if (used[best]) clash = true;
        used[best] = true;
    }
    if (!clash) return pick;
    std::vector<int> perm(n), best(n);
    std::iota(perm.begin(), perm.end(), 0);
    double bd = std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::abs(rts[i] - pred[perm[i]]);
        if (s < bd) { bd = s; best = perm; }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

LimitStudy run_study(ParamVec predicted, Cx predicted_ratio,
                     const std::function<CPoly(double)>& make_poly,
                     const std::vector<double>& eps_list) {
    if (eps_list.empty()) throw Error("eps_list must be non-empty");
    LimitStudy st;
    st.eps = eps_list;
    st.predicted = predicted;
    st.predicted_ratio = predicted_ratio;
    for (double e : eps_list) {
        RootSet rs = roots(make_poly(e));
        if (rs.roots.size() != predicted.size())
            throw MatchingFailure("perturbed degree does not match the predicted root count");
        auto pick = match_roots(rs.roots, predicted);
        ParamVec aligned(predicted.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            double d = std::abs(rs.roots[i] - predicted[pick[i]]);
            if (d > kMatchBound)
                throw MatchingFailure("a perturbed root is outside the safety bound of every limit");
            worst = std::max(worst, d);
            aligned[pick[i]] = rs.roots[i];
        }
        st.perturbed_roots.push_back(aligned);
        st.match_err.push_back(worst);
        st.ratio.push_back(e / aligned[0]);   // predicted[0] == 0 by construction
    }
    int n = static_cast<int>(eps_list.size());
    if (n >= 2) {
        double e1 = eps_list[n - 2], e2 = eps_list[n - 1];
        st.extrapolated_ratio = st.ratio[n - 1] +
            (st.ratio[n - 1] - st.ratio[n - 2]) * (e2 / (e1 - e2));
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < n; ++i) {
            double x = std::log(eps_list[i]);
            double y = std::log(std::max(st.match_err[i], 1e-300));
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        st.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    } else {
        st.extrapolated_ratio = st.ratio[0];
        st.slope = std::numeric_limits<double>::quiet_NaN();
    }
    return st;
}

} // namespace

CPoly::CPoly(ParamVec raw, double assembly_scale)
    : coeffs(std::move(raw)), scale(std::max(assembly_scale, 1e-300)) {
    double thr = kTrimRel * scale;
    while (!coeffs.empty() && std::abs(coeffs.back()) <= thr) coeffs.pop_back();
}

Cx CPoly::eval(Cx t) const {
    Cx v = 0.0;
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) v = v * t + coeffs[k];
    return v;
}

Cx ckr(int k, const IpdSpec& spec) {
    int m = spec.m_total();
    if (k < 0 || k > m) throw Error("ckr: k out of range [0, m_total]");
    ParamVec sig = sigma_coeffs(spec);
    Cx fm = pochhammer_ipd(spec, 0.0);
    Cx s1 = 0.0;
    for (int j = k; j <= m; ++j) s1 += sig[j] * double(stirling2(j, k));
    s1 /= fm;
    ParamVec top;
    top.push_back(Cx(double(-k)));
    for (const Cx& fpm : spec.f_plus_m()) top.push_back(fpm);
    Cx s2 = unit_terminating(top, spec.f, k).first * neg1pow(k) / fact(k);
    if (std::abs(s1 - s2) > kDualFormTol * std::max(1.0, std::abs(s1)))
        throw Error("ckr: closed forms disagree beyond tolerance");
    return s1;
}

CPoly qm_poly(Cx b, Cx c, const IpdSpec& spec) {
    int m = spec.m_total();
    for (int i = 1; i <= m; ++i)
        if (std::abs(c - b - double(i)) <= kIntSnapTol)
            throw DegenerateNormalizer("(c-b-m)_m vanishes");
    Cx norm = pochhammer(c - b - double(m), m);
    ParamVec C = ckr_all(spec);
    Accum acc(m + 1);
    for (int k = 0; k <= m; ++k) {
        Cx w = pochhammer(b, k) * C[k] / norm;
        ParamVec prod{Cx(1.0)};
        for (int i = 0; i < k; ++i) prod = mul_linear(prod, Cx(double(i)), Cx(1.0));
        for (int i = 0; i < m - k; ++i) prod = mul_linear(prod, c - b - double(m) + double(i), Cx(-1.0));
        acc.add(prod, w);
    }
    return CPoly(std::move(acc.c), acc.scale());
}

CPoly qmhat_poly(Cx a, Cx b, Cx c, const IpdSpec& spec) {
    int m = spec.m_total();
    for (int i = 1; i <= m; ++i) {
        if (std::abs(c - a - double(i)) <= kIntSnapTol)
            throw DegenerateNormalizer("(c-a-m)_m vanishes");
        if (std::abs(c - b - double(i)) <= kIntSnapTol)
            throw DegenerateNormalizer("(c-b-m)_m vanishes");
    }
    ParamVec C = ckr_all(spec);
    ParamVec vals(m + 1);
    double mag = 0.0;
    for (int t = 0; t <= m; ++t) {
        auto ev = qmhat_direct(a, b, c, spec, Cx(double(t)), C);
        vals[t] = ev.first;
        mag = std::max(mag, ev.second);
    }
    return CPoly(interpolate_at_integers(vals), mag);
}

CPoly r_poly(Cx b, const IpdSpec& spec, int q) {
    check_q_range(q, spec);
    int m = spec.m_total();
    int deg = m - q - 1;
    ParamVec C = ckr_all(spec);
    Accum lem(deg + 1);
    for (int k = 0; k <= m; ++k) {
        Cx w = pochhammer(b, k) * C[k] * neg1pow(k);
        ParamVec prod{Cx(1.0)};
        for (int i = 0; i < deg; ++i) prod = mul_linear(prod, Cx(double(1 - k + i)), Cx(-1.0));
        lem.add(prod, w);
    }
    Cx fm = pochhammer_ipd(spec, 0.0);
    Accum alt(deg + 1);
    for (int k = 0; k <= deg; ++k) {
        Cx w = pochhammer_ipd(spec, -b - double(k)) * pochhammer(b, k) *
               pochhammer(Cx(double(q + 1 - m)), k) / (fm * fact(k));
        ParamVec prod{Cx(1.0)};
        for (int i = 0; i < deg - k; ++i) prod = mul_linear(prod, b + double(k + 1 + i), Cx(-1.0));
        alt.add(prod, w);
    }
    double tol = kDualFormTol * std::max({lem.scale(), alt.scale(), 1.0});
    for (int j = 0; j <= deg; ++j)
        if (std::abs(lem.c[j] - alt.c[j]) > tol)
            throw Error("r_poly: closed forms disagree beyond tolerance");
    return CPoly(std::move(lem.c), lem.scale());
}

CPoly rhat_poly(Cx a, Cx b, const IpdSpec& spec, int q) {
    check_q_range(q, spec);
    check_ab_difference(a, b, q, spec);
    int m = spec.m_total();
    int deg = m - q - 1;
    ParamVec C = ckr_all(spec);
    ParamVec vals(deg + 1);
    double mag = 0.0;
    for (int t = 0; t <= deg; ++t) {
        auto ev = rhat_direct(a, b, spec, q, Cx(double(t)), C);
        vals[t] = ev.first;
        mag = std::max(mag, ev.second);
    }
    return CPoly(interpolate_at_integers(vals), mag);
}

Cx q0_value(Cx b, const IpdSpec& spec, int q, int l) {
    check_q_range(q, spec);
    if (l < 0 || l > q) throw ConstraintViolation("l must lie in [0, q]");
    if (l == 0) return 1.0;
    int m = spec.m_total();
    ParamVec C = ckr_all(spec);
    Cx s = 0.0;
    for (int k = 0; k <= l; ++k)
        s += pochhammer(b, k) * C[k] * pochhammer(Cx(double(-l)), k) *
             pochhammer(Cx(double(m - q)), l - k);
    return s / pochhammer(Cx(double(-q)), l);
}

Cx qhat0_value(Cx a, Cx b, const IpdSpec& spec, int q, int l) {
    check_q_range(q, spec);
    check_ab_difference(a, b, q, spec);
    if (l < 0 || l > q) throw ConstraintViolation("l must lie in [0, q]");
    if (l == 0) return 1.0;
    int m = spec.m_total();
    ParamVec C = ckr_all(spec);
    Cx s = 0.0;
    for (int k = 0; k <= l; ++k) {
        Cx pref = neg1pow(k) * pochhammer(Cx(double(-l)), k) * pochhammer(a, k) *
                  pochhammer(b, k) * C[k] /
                  (pochhammer(Cx(double(-q)), k) * pochhammer(a - b - double(q), k));
        Cx inner = unit_terminating({Cx(double(k - m)), Cx(double(k - l)), -b - double(q)},
                                    {Cx(double(k - q)), a - b - double(q) + double(k)},
                                    l - k)
                       .first;
        s += pref * inner;
    }
    return s;
}

Cx r_at(Cx b, const IpdSpec& spec, int q) {
    check_q_range(q, spec);
    int m = spec.m_total();
    ParamVec C = ckr_all(spec);
    Cx s = 0.0;
    for (int k = 0; k <= q + 1; ++k)
        s += pochhammer(b, k) * C[k] * neg1pow(k) *
             pochhammer(Cx(double(k - m)), m - q - 1);
    return neg1pow(m - q + 1) * s;
}

Cx rhat_at(Cx a, Cx b, const IpdSpec& spec, int q) {
    check_q_range(q, spec);
    check_ab_difference(a, b, q, spec);
    int m = spec.m_total();
    ParamVec C = ckr_all(spec);
    Cx s = 0.0;
    for (int k = 0; k <= q + 1; ++k)
        s += pochhammer(Cx(double(k - m)), q + 1 - k) * pochhammer(a, k) * C[k] /
             fact(q + 1 - k);
    return s * pochhammer(b, q + 1) / pochhammer(b - a, q + 1);
}

RootSet roots(const CPoly& p) {
    if (p.is_zero()) throw IdenticallyZero("roots of the identically-zero polynomial");
    int d = p.degree();
    RootSet out;
    if (d == 0) return out;
    const ParamVec& c = p.coeffs;
    auto pval = [&](Cx x) {
        Cx v = 0.0;
        for (int k = d; k >= 0; --k) v = v * x + c[k];
        return v;
    };
    auto pder = [&](Cx x) {
        Cx v = 0.0;
        for (int k = d; k >= 1; --k) v = v * x + c[k] * double(k);
        return v;
    };
    std::vector<Cx> z(d);
    if (d == 1) {
        z[0] = -c[0] / c[1];
    } else {
        double lead = std::abs(c[d]);
        double radius = 0.0;
        for (int k = 0; k < d; ++k) radius = std::max(radius, std::abs(c[k]) / lead);
        radius = 1.0 + radius;
        constexpr double two_pi = 6.28318530717958647692;
        for (int i = 0; i < d; ++i) {
            double ang = two_pi * (double(i) + 0.27) / double(d) + 0.42;
            z[i] = 0.7 * radius * Cx(std::cos(ang), std::sin(ang));
        }
        for (int it = 0; it < 400; ++it) {
            double worst = 0.0;
            for (int i = 0; i < d; ++i) {
                Cx pv = pval(z[i]);
                if (pv == Cx(0.0)) continue;
                Cx dv = pder(z[i]);
                if (dv == Cx(0.0)) {   // stationary start: nudge off the symmetry point
                    z[i] += 1e-6 * radius;
                    worst = 1.0;
                    continue;
                }
                Cx nr = pv / dv;
                Cx s = 0.0;
                for (int j = 0; j < d; ++j)
                    if (j != i) {
                        Cx dz = z[i] - z[j];
                        if (dz == Cx(0.0)) dz = Cx(1e-12 * radius, 1e-12 * radius);
                        s += Cx(1.0) / dz;
                    }
                Cx den = Cx(1.0) - nr * s;
                Cx w = (den == Cx(0.0)) ? nr : nr / den;
                z[i] -= w;
                worst = std::max(worst, std::abs(w) / (1.0 + std::abs(z[i])));
            }
            if (worst < 1e-14) break;
        }
    }
    for (int i = 0; i < d; ++i)
        for (int step = 0; step < 2; ++step) {
            Cx dv = pder(z[i]);
            if (dv == Cx(0.0)) break;
            Cx w = pval(z[i]) / dv;
            if (!(std::abs(w) < 1e30)) break;
            z[i] -= w;
        }
    std::vector<std::pair<Cx, double>> rr(d);
    for (int i = 0; i < d; ++i) {
        double den = 0.0, xp = 1.0, ax = std::abs(z[i]);
        for (int k = 0; k <= d; ++k) {
            den += std::abs(c[k]) * xp;
            xp *= ax;
        }
        double res = std::abs(pval(z[i])) / std::max(den, 1e-300);
        if (res > kResidualTol)
            throw IllConditioned("root residual exceeds the backward-error bound");
        rr[i] = {z[i], res};
    }
    std::sort(rr.begin(), rr.end(),
              [](const auto& u, const auto& v) { return lex_less(u.first, v.first); });
    for (auto& [root, res] : rr) {
        out.roots.push_back(root);
        out.residuals.push_back(res);
    }
    return out;
}

LimitStudy lemma1_limit_study(Cx b, Cx c_base, const IpdSpec& spec, int q,
                              const std::vector<double>& eps_list) {
    check_q_range(q, spec);
    int m = spec.m_total();
    if (std::abs(c_base - (b + double(m - q))) > kIntSnapTol)
        throw ConstraintViolation("c_base must equal b + m - q");
    CPoly R = r_poly(b, spec, q);
    if (R.is_zero())
        throw IdenticallyZero("reduced polynomial vanishes identically; no finite limit set");
    ParamVec predicted;
    for (int l = 0; l <= q; ++l) predicted.push_back(Cx(double(-l)));
    if (R.degree() > 0) {
        RootSet rr = roots(R);
        predicted.insert(predicted.end(), rr.roots.begin(), rr.roots.end());
    }
    Cx pred_ratio = R.eval(0.0) / fact(m - q - 1);
    return run_study(std::move(predicted), pred_ratio,
                     [&](double e) { return qm_poly(b, c_base + e, spec); }, eps_list);
}

LimitStudy lemma2_limit_study(Cx a, Cx b, Cx c_base, const IpdSpec& spec, int q,
                              const std::vector<double>& eps_list) {
    check_q_range(q, spec);
    int m = spec.m_total();
    if (std::abs(c_base - (a + double(m - q))) > kIntSnapTol)
        throw ConstraintViolation("c_base must equal a + m - q");
    CPoly Rh = rhat_poly(a, b, spec, q);
    if (Rh.is_zero())
        throw IdenticallyZero("reduced polynomial vanishes identically; no finite limit set");
    ParamVec predicted;
    for (int l = 0; l <= q; ++l) predicted.push_back(Cx(double(-l)));
    if (Rh.degree() > 0) {
        RootSet rr = roots(Rh);
        predicted.insert(predicted.end(), rr.roots.begin(), rr.roots.end());
    }
    Cx pred_ratio = neg1pow(q + 1) * Rh.eval(0.0);
    return run_study(std::move(predicted), pred_ratio,
                     [&](double e) { return qmhat_poly(a, b, c_base + e, spec); }, eps_list);
}

} // namespace hypid
