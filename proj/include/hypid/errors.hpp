#pragma once

#include <stdexcept>
#include <string>

namespace hypid {

// Base for all library errors so callers can catch hypid failures in one sweep.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gamma/lgamma requested at a non-positive integer.
struct PoleError : Error {
    using Error::Error;
};

// Series cannot converge for the requested argument/parameters.
struct NonConvergent : Error {
    using Error::Error;
};

// A bottom parameter hits a non-positive integer before the series terminates.
struct BottomPole : Error {
    using Error::Error;
};

// Normalizing Pochhammer of a characteristic polynomial vanishes, i.e. the
// parameter set sits exactly on a degenerate hyperplane.
struct DegenerateNormalizer : Error {
    using Error::Error;
};

// An identity's stated parameter constraints are violated at construction.
struct ConstraintViolation : Error {
    using Error::Error;
};

// Perturbed roots cannot be paired with predicted limits within safety bounds.
struct MatchingFailure : Error {
    using Error::Error;
};

// Root extraction requested for the identically-zero polynomial.
struct IdenticallyZero : Error {
    using Error::Error;
};

// Root extraction residual exceeds the backward-error acceptance bound.
struct IllConditioned : Error {
    using Error::Error;
};

// Malformed CLI/config input; carries a position when one is known.
struct ParseError : Error {
    explicit ParseError(const std::string& what, long pos = -1)
        : Error(pos >= 0 ? what + " (at position " + std::to_string(pos) + ")" : what),
          position(pos) {}
    long position;
};

} // namespace hypid
