#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hypid/errors.hpp"

namespace hypid {

using Cx = std::complex<double>;
using ParamVec = std::vector<Cx>;

// Snap tolerance for "is this an integer" decisions throughout the library.
inline constexpr double kIntSnapTol = 1e-9;

// A list of integral parameter differences: parameters f_1..f_r paired with
// positive integer shifts m_1..m_r, appearing as (f_j + m_j) on top against
// f_j on the bottom. Invariants: r >= 1, each m_j >= 1, and no f_j is a
// non-positive integer (bottom-parameter legality).
struct IpdSpec {
    ParamVec f;              // f_1..f_r
    std::vector<int> m;      // m_1..m_r, all >= 1
    IpdSpec() = default;
    IpdSpec(ParamVec f_, std::vector<int> m_);
    int r() const { return static_cast<int>(f.size()); }
    int m_total() const;     // m_1 + ... + m_r
    ParamVec f_plus_m() const;
};

bool is_nonpositive_integer(Cx z, double tol = kIntSnapTol);
// Exact binomial coefficient as a double (n <= 60 stays exact in 53 bits).
double binom(int n, int k);
// z^n by repeated multiplication: branch-free for integer powers, unlike
// std::pow on the principal log. Negative n inverts.
Cx pow_int(Cx z, long long n);
// Nearest integer when z is within tol of one; throws Error otherwise.
long long snap_integer(Cx z, double tol = kIntSnapTol);

// Rising factorial (a)_n, n >= 0. Exact product for n <= 64, else the
// lgamma-ratio form. Vanishes (exactly 0) when a is a non-positive integer
// with |a| < n; that is a legal value, not an error.
Cx pochhammer(Cx a, long long n);

// Componentwise product prod_j (a_j)_n.
Cx pochhammer_vec(const ParamVec& a, long long n);

// Mixed-shift product prod_j (f_j + shift)_{m_j}.
Cx pochhammer_ipd(const IpdSpec& spec, Cx shift);

// Stirling numbers of the second kind S(j,k), exact in 64-bit for j <= 25
// (larger j would overflow and throws Error). S(j,k) = 0 for k > j.
long long stirling2(int j, int k);

// Coefficients sigma_0..sigma_m of prod_j (f_j + x)_{m_j} as a polynomial in
// x (ascending). sigma_m = 1.
ParamVec sigma_coeffs(const IpdSpec& spec);

// Gamma on the complex plane: Lanczos (g = 607/128, 15 terms) for
// Re z >= 0.5, reflection below. Throws PoleError within kIntSnapTol of a
// non-positive integer.
Cx gamma_cx(Cx z);

// A logarithm of gamma_cx(z): principal-branch Lanczos sum for Re z >= 0.5;
// for Re z < 0.5 the reflection combination log(pi) - log sin(pi z)
// - lgamma(1-z), which is a valid logarithm of Gamma(z) though not always
// the principal one. Differences of such values are branch-safe under exp().
Cx lgamma_cx(Cx z);

// exp(sum lgamma(num_i) - sum lgamma(den_j)). Strict: a pole in either list
// throws PoleError; callers needing a vanishing-ratio limit handle it first.
Cx gamma_ratio(const ParamVec& num, const ParamVec& den);

} // namespace hypid
