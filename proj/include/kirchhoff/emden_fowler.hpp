#pragma once

// Ground profile W_p: the positive solution of -W'' = W^p on (0,1) with
// W(0) = W(1) = 0.
//
// Closed forms (xi = sup W = W(1/2)):
//   xi            = (2(p+1))^(1/(p-1)) L(p,0)^(2/(p-1))
//   ||W||_2^2     = L(p,2) / L(p,0) * xi^2
//   ||W'||_m^m    = 2^(mp/(p-1)) (p+1)^(m/(p-1)) L(p,0)^((mp+m-p+1)/(p-1)) M(p,m)
//
// Pointwise values come from the time map. Writing W = xi (1 - v^2), the
// distance from the apex satisfies
//
//   1/2 - x = J(v) / (2 L(p,0)),   J(v) = int_0^v 2 / sqrt(h(w)) dw,
//
// with h the apex weight of special_integrals.hpp. J' lies in
// [2/sqrt(p+1), 2], so inverting for v is well conditioned all the way to the
// apex; very close to it the quadratic Taylor model is used instead.

#include "kirchhoff/detail/quadrature.hpp"
#include "kirchhoff/detail/roots.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/special_integrals.hpp"

#include <cmath>

namespace kirchhoff {

inline double grad_norm_m(double p, double m, double tol = kDefaultQuadratureTol);

class EmdenFowlerProfile {
public:
    /// Half-width of the window around x = 1/2 where the Taylor model is used.
    static constexpr double kApexWindow = 1e-4;

    static EmdenFowlerProfile build(double p, double tol = kDefaultQuadratureTol) {
        detail::require_exponent(p);
        EmdenFowlerProfile w;
        w.p_ = p;
        w.L0_ = eval_L(p, 0.0, tol).value;
        w.L2_ = eval_L(p, 2.0, tol).value;
        w.M2_ = eval_M(p, 2.0, tol).value;
        w.xi_ = std::pow(2.0 * (p + 1.0), 1.0 / (p - 1.0)) * std::pow(w.L0_, 2.0 / (p - 1.0));
        w.l2_sq_ = w.L2_ / w.L0_ * w.xi_ * w.xi_;
        w.grad_sq_ = std::exp(2.0 * p / (p - 1.0) * std::log(2.0) +
                              2.0 / (p - 1.0) * std::log(p + 1.0) +
                              (p + 3.0) / (p - 1.0) * std::log(w.L0_)) *
                     w.M2_;
        w.half_span_ = w.apex_integral(1.0);
        return w;
    }

    double p() const { return p_; }
    double sup_norm() const { return xi_; }
    double l2_norm() const { return std::sqrt(l2_sq_); }
    double l2_norm_sq() const { return l2_sq_; }
    double grad_l2_norm() const { return std::sqrt(grad_sq_); }
    double grad_l2_norm_sq() const { return grad_sq_; }
    double L0() const { return L0_; }
    double L2() const { return L2_; }
    double M2() const { return M2_; }

    double grad_norm_m(double m) const { return kirchhoff::grad_norm_m(p_, m); }

    /// W_p(x) for x in [0, 1].
    double evaluate(double x) const {
        check_position(x);
        const double y = fold_to_left_half(x);
        if (y == 0.0) return 0.0;
        const double r = 0.5 - y;
        if (r < kApexWindow) return xi_ - 0.5 * std::pow(xi_, p_) * r * r;
        const double v = apex_distance(y);
        return xi_ * (1.0 - v * v);
    }

    /// W_p'(x) for x in [0, 1]; positive on [0, 1/2), negative past the apex.
    double derivative(double x) const {
        check_position(x);
        const double y = fold_to_left_half(x);
        const double sign = x > 0.5 ? -1.0 : 1.0;
        const double r = 0.5 - y;
        if (r < kApexWindow) return sign * std::pow(xi_, p_) * r;
        const double v = y == 0.0 ? 1.0 : apex_distance(y);
        // sqrt(2/(p+1) (xi^(p+1) - W^(p+1))) with W = xi (1 - v^2)
        return sign * std::sqrt(2.0 / (p_ + 1.0)) * std::pow(xi_, 0.5 * (p_ + 1.0)) * v *
               std::sqrt(detail::apex_weight(v, p_));
    }

private:
    EmdenFowlerProfile() = default;

    static void check_position(double x) {
        detail::require(x >= 0.0 && x <= 1.0, "position must lie in [0, 1]");
    }

    static double fold_to_left_half(double x) { return x > 0.5 ? 1.0 - x : x; }

    double apex_integral(double v) const {
        return detail::adaptive_integrate(
                   [this](double w) { return 2.0 / std::sqrt(detail::apex_weight(w, p_)); }, 0.0, v)
            .value;
    }

    // v in [0, 1] with W(y) = xi (1 - v^2), for y in (0, 1/2).
    double apex_distance(double y) const {
        const double target = half_span_ * (1.0 - 2.0 * y);
        if (target >= half_span_) return 1.0;
        auto residual = [&](double v) { return apex_integral(v) - target; };
        return detail::bracketed_root<double>(residual, 0.0, 1.0, -target, half_span_ - target,
                                              1e-14, 200, "time-map inversion");
    }

    double p_ = 0.0;
    double xi_ = 0.0;
    double L0_ = 0.0;
    double L2_ = 0.0;
    double M2_ = 0.0;
    double l2_sq_ = 0.0;
    double grad_sq_ = 0.0;
    double half_span_ = 0.0;  // J(1), equal to L(p,0) up to quadrature error
};

inline EmdenFowlerProfile build_profile(double p, double tol = kDefaultQuadratureTol) {
    return EmdenFowlerProfile::build(p, tol);
}

inline double grad_norm_m(double p, double m, double tol) {
    detail::require_exponent(p);
    detail::require(m >= 1.0, "norm order m must be >= 1");
    const double L0 = eval_L(p, 0.0, tol).value;
    const double Mm = eval_M(p, m, tol).value;
    const double log_scale = m * p / (p - 1.0) * std::log(2.0) +
                             m / (p - 1.0) * std::log(p + 1.0) +
                             (m * p + m - p + 1.0) / (p - 1.0) * std::log(L0);
    return std::exp(log_scale) * Mm;
}

inline double evaluate(double p, double x) { return build_profile(p).evaluate(x); }

inline double derivative(double p, double x) { return build_profile(p).derivative(x); }

}  // namespace kirchhoff
