#pragma once

// Bracketed scalar root finding. TOMS 748 (Alefeld, Potra, Shi) does the
// refinement; this layer adds bracket validation, bracket growth and a
// tolerance expressed as an absolute width in the solve variable.

#include "kirchhoff/errors.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

namespace kirchhoff::detail {

template <class Real>
struct WidthTolerance {
    Real width;
    bool operator()(const Real& a, const Real& b) const {
        using std::abs;
        return abs(b - a) <= width;
    }
};

/// Root of `f` in [a, b] given f(a), f(b) of opposite sign. The returned
/// point is the midpoint of a final bracket no wider than `width`.
template <class Real, class F>
Real bracketed_root(F&& f, Real a, Real b, Real fa, Real fb, Real width,
                    std::uintmax_t max_iter = 400, const char* what = "root") {
    if (fa == 0) return a;
    if (fb == 0) return b;
    if ((fa > 0) == (fb > 0)) {
        throw ConvergenceError(std::string(what) + ": endpoints do not bracket a sign change");
    }
    std::uintmax_t iters = max_iter;
    auto bracket = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                     WidthTolerance<Real>{width}, iters);
    using std::abs;
    if (iters >= max_iter && abs(bracket.second - bracket.first) > width) {
        throw ConvergenceError(std::string(what) + ": iteration budget exhausted");
    }
    return (bracket.first + bracket.second) / 2;
}

template <class Real, class F>
Real bracketed_root(F&& f, Real a, Real b, Real width, std::uintmax_t max_iter = 400,
                    const char* what = "root") {
    const Real fa = f(a);
    const Real fb = f(b);
    return bracketed_root<Real>(std::forward<F>(f), a, b, fa, fb, width, max_iter, what);
}

/// Walks `x` by `step` (added each time) until `still_same_side(x)` is false.
/// Returns the last point on the original side and the first point past it.
template <class Real, class Pred>
std::pair<Real, Real> march_until(Pred&& still_same_side, Real start, Real step, int max_steps,
                                  const char* what) {
    Real prev = start;
    Real x = start;
    for (int k = 0; k < max_steps; ++k) {
        if (!still_same_side(x)) return {prev, x};
        prev = x;
        x += step;
    }
    throw ConvergenceError(std::string(what) + ": bracket growth exhausted");
}

}  // namespace kirchhoff::detail
