#include "hypid/arith.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace hypid {

IpdSpec::IpdSpec(ParamVec f_, std::vector<int> m_) : f(std::move(f_)), m(std::move(m_)) {
    if (f.size() != m.size())
        throw Error("IpdSpec: f and m must have equal length");
    if (f.empty())
        throw Error("IpdSpec: at least one parameter pair required");
    for (int mj : m)
        if (mj < 1)
            throw Error("IpdSpec: shifts must be positive integers");
    for (const Cx& fj : f)
        if (is_nonpositive_integer(fj))
            throw Error("IpdSpec: f entries must not be non-positive integers");
}

Cx pow_int(Cx z, long long n) {
    if (n < 0) return 1.0 / pow_int(z, -n);
    Cx r(1.0, 0.0);
    while (n > 0) {
        if (n & 1) r *= z;
        z *= z;
        n >>= 1;
    }
    return r;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(c);
}

int IpdSpec::m_total() const {
    int s = 0;
    for (int mj : m) s += mj;
    return s;
}

ParamVec IpdSpec::f_plus_m() const {
    ParamVec out(f);
    for (size_t j = 0; j < out.size(); ++j) out[j] += static_cast<double>(m[j]);
    return out;
}

bool is_nonpositive_integer(Cx z, double tol) {
    if (std::abs(z.imag()) > tol) return false;
    double n = std::round(z.real());
    return n <= 0.5 && std::abs(z.real() - n) <= tol;
}

long long snap_integer(Cx z, double tol) {
    double n = std::round(z.real());
    if (std::abs(z.imag()) > tol || std::abs(z.real() - n) > tol)
        throw Error("snap_integer: value is not within tolerance of an integer");
    return static_cast<long long>(n);
}

Cx pochhammer(Cx a, long long n) {
    if (n < 0) throw Error("pochhammer: negative order");
    if (n == 0) return Cx(1.0, 0.0);
    if (n <= 64) {
        Cx p(1.0, 0.0);
        for (long long k = 0; k < n; ++k) p *= a + static_cast<double>(k);
        return p;
    }
    if (is_nonpositive_integer(a)) {
        long long a_int = snap_integer(a);
        if (-a_int < n) return Cx(0.0, 0.0); // zero factor inside the product
        // All factors negative integers: (a)_n = (-1)^n Gamma(1-a)/Gamma(1-a-n).
        double sign = (n % 2 == 0) ? 1.0 : -1.0;
        return sign * std::exp(lgamma_cx(1.0 - a) - lgamma_cx(1.0 - a - static_cast<double>(n)));
    }
    return std::exp(lgamma_cx(a + static_cast<double>(n)) - lgamma_cx(a));
}

Cx pochhammer_vec(const ParamVec& a, long long n) {
    Cx p(1.0, 0.0);
    for (const Cx& ai : a) p *= pochhammer(ai, n);
    return p;
}

Cx pochhammer_ipd(const IpdSpec& spec, Cx shift) {
    Cx p(1.0, 0.0);
    for (int j = 0; j < spec.r(); ++j) p *= pochhammer(spec.f[j] + shift, spec.m[j]);
    return p;
}

namespace {

// Largest j whose full row S(j,*) stays within 64-bit range; S(26,*) peaks
// near 1e20 and would overflow, so requests beyond this throw.
constexpr int kStirlingMaxJ = 25;

const auto& stirling_table() {
    // Magic static: built once, thread-safe initialization.
    static const auto table = [] {
        std::array<std::array<long long, kStirlingMaxJ + 1>, kStirlingMaxJ + 1> t{};
        t[0][0] = 1;
        for (int j = 1; j <= kStirlingMaxJ; ++j)
            for (int k = 1; k <= j; ++k)
                t[j][k] = static_cast<long long>(k) * t[j - 1][k] + t[j - 1][k - 1];
        return t;
    }();
    return table;
}

} // namespace

long long stirling2(int j, int k) {
    if (j < 0 || k < 0) throw Error("stirling2: negative index");
    if (k > j) return 0;
    if (j > kStirlingMaxJ) throw Error("stirling2: row exceeds exact 64-bit range");
    return stirling_table()[j][k];
}

ParamVec sigma_coeffs(const IpdSpec& spec) {
    // prod_j (f_j + x)_{m_j} = prod over all linear factors (f_j + i + x).
    ParamVec coeffs{Cx(1.0, 0.0)};
    for (int j = 0; j < spec.r(); ++j) {
        for (int i = 0; i < spec.m[j]; ++i) {
            Cx c = spec.f[j] + static_cast<double>(i);
            coeffs.push_back(Cx(0.0, 0.0));
            for (size_t d = coeffs.size() - 1; d >= 1; --d)
                coeffs[d] = coeffs[d - 1] + c * coeffs[d];
            coeffs[0] *= c;
        }
    }
    return coeffs; // ascending in x, degree m_total, leading coefficient 1
}

namespace {

// Lanczos coefficients, g = 607/128, n = 15 (Godfrey/Pugh tabulation).
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,   -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978, 3.3994649984811888699e-5,
    4.6523628927048575665e-5,   -9.8374475304879564677e-5, 1.5808870322491248884e-4,
    -2.1026444172410488319e-4,  2.1743961811521264320e-4, -1.6431810653676389022e-4,
    8.4418223983852743293e-5,   -2.6190838401581408670e-5, 3.6899182659531622704e-6,
};

// Principal-branch lgamma for Re z >= 0.5 only.
Cx lgamma_positive_half(Cx z) {
    Cx zm1 = z - 1.0;
    Cx a(kLanczos[0], 0.0);
    for (int k = 1; k < 15; ++k) a += kLanczos[k] / (zm1 + static_cast<double>(k));
    Cx t = zm1 + kLanczosG + 0.5;
    constexpr double half_log_two_pi = 0.91893853320467274178; // log(2*pi)/2
    return half_log_two_pi + (zm1 + 0.5) * std::log(t) - t + std::log(a);
}

} // namespace

Cx lgamma_cx(Cx z) {
    if (is_nonpositive_integer(z))
        throw PoleError("lgamma_cx: pole at non-positive integer");
    if (z.real() >= 0.5) return lgamma_positive_half(z);
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    const double pi = std::numbers::pi;
    return std::log(Cx(pi, 0.0)) - std::log(std::sin(pi * z)) - lgamma_positive_half(1.0 - z);
}

Cx gamma_cx(Cx z) {
    return std::exp(lgamma_cx(z));
}

Cx gamma_ratio(const ParamVec& num, const ParamVec& den) {
    Cx s(0.0, 0.0);
    for (const Cx& v : num) s += lgamma_cx(v);
    for (const Cx& v : den) s -= lgamma_cx(v);
    return std::exp(s);
}

} // namespace hypid
