#pragma once

// The two integral families
//
//   L(p, q) = int_0^1 s^q (1 - s^(p+1))^(-1/2) ds,     p > 1, q >= 0
//   M(p, m) = int_0^1 (1 - s^(p+1))^((m-1)/2) ds,       p > 1, m >= 1
//
// Both are split at s = 1/2. Near s = 1 we substitute s = 1 - v^2, which turns
// (1 - s^(p+1))^(-1/2) ds into 2 dv / sqrt(h(v)) with
//
//   h(v) = (1 - (1 - v^2)^(p+1)) / v^2,   h(0) = p + 1,  h(1) = 1,
//
// smooth and bounded away from zero on [0, 1]. Near s = 0, L uses y = s^(q+1)
// when q <= p so the s^q factor does not spoil differentiability for small
// fractional q. Every piece is C^1 on its closed interval.

#include "kirchhoff/detail/quadrature.hpp"
#include "kirchhoff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace kirchhoff {

inline constexpr double kDefaultQuadratureTol = 1e-12;

struct IntegralValue {
    double value = 0.0;
    double abs_error_estimate = 0.0;
};

namespace detail {

/// (1 - (1 - v^2)^(p+1)) / v^2 without cancellation, for v in [0, 1].
inline double apex_weight(double v, double p) {
    const double v2 = v * v;
    if (v2 < 1e-12) return (p + 1.0) * (1.0 - 0.5 * p * v2);
    return -std::expm1((p + 1.0) * std::log1p(-v2)) / v2;
}

inline double quad_rel_tol(double tol) { return std::max(0.1 * tol, 1e-13); }

inline std::string format_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

inline IntegralValue checked(double value, double err, double tol, const char* name) {
    if (!(err <= tol) || !std::isfinite(value)) {
        throw ConvergenceError(std::string(name) + ": quadrature error estimate " +
                               format_sci(err) + " exceeds tolerance " + format_sci(tol));
    }
    return {value, err};
}

inline const double kSplitV = std::sqrt(0.5);  // s = 1/2 in the apex variable

}  // namespace detail

inline IntegralValue eval_L(double p, double q, double tol = kDefaultQuadratureTol) {
    detail::require_exponent(p);
    detail::require(q >= 0.0, "L(p,q) needs q >= 0");
    detail::require(tol > 0.0, "tolerance must be positive");

    detail::QuadratureResult left;
    if (q <= p) {
        const double a = (p + 1.0) / (q + 1.0);
        left = detail::endpoint_integrate(
            [&](double y) { return 1.0 / (std::sqrt(1.0 - std::pow(y, a)) * (q + 1.0)); },
            0.0, std::pow(0.5, q + 1.0), detail::quad_rel_tol(tol));
    } else {
        left = detail::endpoint_integrate(
            [&](double s) { return std::pow(s, q) / std::sqrt(1.0 - std::pow(s, p + 1.0)); },
            0.0, 0.5, detail::quad_rel_tol(tol));
    }
    const auto right = detail::endpoint_integrate(
        [&](double v) {
            return 2.0 * std::pow(1.0 - v * v, q) / std::sqrt(detail::apex_weight(v, p));
        },
        0.0, detail::kSplitV, detail::quad_rel_tol(tol));
    return detail::checked(left.value + right.value, left.error + right.error, tol, "L(p,q)");
}

inline IntegralValue eval_M(double p, double m, double tol = kDefaultQuadratureTol) {
    detail::require_exponent(p);
    detail::require(m >= 1.0, "M(p,m) needs m >= 1");
    detail::require(tol > 0.0, "tolerance must be positive");

    const double e = 0.5 * (m - 1.0);
    const auto left = detail::endpoint_integrate(
        [&](double s) { return std::pow(1.0 - std::pow(s, p + 1.0), e); }, 0.0, 0.5,
        detail::quad_rel_tol(tol));
    const auto right = detail::endpoint_integrate(
        [&](double v) { return 2.0 * std::pow(v, m) * std::pow(detail::apex_weight(v, p), e); },
        0.0, detail::kSplitV, detail::quad_rel_tol(tol));
    return detail::checked(left.value + right.value, left.error + right.error, tol, "M(p,m)");
}

/// Euler Beta function through log-Gamma. Independent of the quadrature above;
/// used as a cross-check by the tests and by `verify`.
inline double beta_oracle(double x, double y) {
    detail::require(x > 0.0 && y > 0.0, "beta_oracle needs positive arguments");
    return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

}  // namespace kirchhoff
