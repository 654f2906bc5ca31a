#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

namespace kirchhoff::detail {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b]. Asking for much less than
/// 1e-13 only drives the bisection into roundoff and inflates the estimate.
template <class F>
QuadratureResult adaptive_integrate(F&& f, double a, double b, double rel_tol = 1e-13,
                                    unsigned max_depth = 15) {
    QuadratureResult r;
    r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, rel_tol, &r.error);
    return r;
}

/// Double-exponential rule. Integrands with a fractional power or an
/// integrable singularity at an endpoint make the Gauss-Kronrod estimate
/// pessimistic; this one stays honest there.
template <class F>
QuadratureResult endpoint_integrate(F&& f, double a, double b, double rel_tol = 1e-13) {
    thread_local boost::math::quadrature::tanh_sinh<double> rule;
    QuadratureResult r;
    double l1 = 0.0;
    r.value = rule.integrate(f, a, b, rel_tol, &r.error, &l1);
    // the rule reports 0 when two levels agree exactly; roundoff is still there
    r.error = std::max(r.error, std::numeric_limits<double>::epsilon() * l1);
    return r;
}

/// Composite Simpson rule over uniformly spaced samples (odd sample count).
inline double simpson(std::span<const double> y, double h) {
    const std::size_t n = y.size();
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("simpson: need an odd number >= 3 of samples");
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        (i % 2 ? odd : even) += y[i];
    }
    return h / 3.0 * (y.front() + 4.0 * odd + 2.0 * even + y.back());
}

}  // namespace kirchhoff::detail
