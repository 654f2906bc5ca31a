#pragma once

// Reduction of
//
//   -log(a ||u'||_2^2 + b ||u||_2^2 + 1) u'' = lambda u^p
//
// to the single-norm problem with d0 = a * R(p) + b, where
//
//   R(p) = ||u'||_2^2 / ||u||_2^2 = 4 L(p,0)^2 M(p,2) / L(p,2)
//
// holds for every solution: all of them are multiples of W_p, and the ratio
// is scale invariant. The coefficient of `a` enters once; a second factor of
// `a` would break a||u'||^2 + b||u||^2 = d0 ||u||^2.

#include "kirchhoff/errors.hpp"
#include "kirchhoff/scalar_map.hpp"
#include "kirchhoff/special_integrals.hpp"

namespace kirchhoff {

struct FullProblemParams {
    double a = 0.0;  // gradient coefficient
    double b = 1.0;  // L2 coefficient
    double p = 3.0;

    void validate() const {
        detail::require(a >= 0.0, "a must be >= 0");
        detail::require(b > 0.0, "b must be > 0");
        detail::require_exponent(p);
    }
};

inline double gradient_ratio(double p, double tol = kDefaultQuadratureTol) {
    detail::require_exponent(p);
    const double L0 = eval_L(p, 0.0, tol).value;
    const double L2 = eval_L(p, 2.0, tol).value;
    const double M2 = eval_M(p, 2.0, tol).value;
    return 4.0 * L0 * L0 * M2 / L2;
}

inline double reduced_coefficient(const FullProblemParams& full) {
    full.validate();
    return full.a * gradient_ratio(full.p) + full.b;
}

inline KirchhoffScalarProblem reduce(const FullProblemParams& full) {
    return make_scalar_problem(full.p, reduced_coefficient(full));
}

}  // namespace kirchhoff
