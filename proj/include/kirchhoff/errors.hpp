#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace kirchhoff {

/// Invalid argument: exponent, coefficient, or position outside the admissible set.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative procedure (quadrature, root solve, shooting, fixed point)
/// did not reach its tolerance within budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation requested outside the exponent regime it is defined for, or a
/// nonlocal solve was asked for beyond a nonexistence threshold.
class RegimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Diagnostic undefined because a denominator vanished.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shooting trajectory left the overflow guard.
class BlowupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_value(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

inline void require_exponent(double p) {
    require(std::isfinite(p) && p > 1.0, "exponent p must satisfy p > 1, got " + format_value(p));
}

}  // namespace detail
}  // namespace kirchhoff
