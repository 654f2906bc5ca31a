#pragma once

// Scalar reduction of the nonlocal problem
//
//   -log(d ||u||_2^2 + 1) u'' = lambda u^p,  u(0) = u(1) = 0,  u > 0.
//
// Every solution is u = sqrt(t) / ||W_p||_2 * W_p where t = ||u||_2^2 is a
// positive root of
//
//   f(t) = log(d t + 1) / t^((p-1)/2) = lambda ||W_p||_2^(1-p).
//
// f'(t) = t^(-(p+1)/2) g(t) with g(t) = -(p-1)/2 log(d t + 1) + d t / (d t + 1),
// so the sign of g decides monotonicity:
//   p > 3   f decreases from +inf to 0                  (one root for all lambda)
//   p = 3   f decreases from d to 0                     (one root iff target < d)
//   p < 3   f rises on (0, t2), falls on (t2, inf)      (two, one, or no roots)
//
// The root solves work in u = log t, where f spans many decades smoothly.
// The generic templates in `detail` also run in extended precision for the
// asymptotic validation.

#include "kirchhoff/detail/roots.hpp"
#include "kirchhoff/emden_fowler.hpp"
#include "kirchhoff/errors.hpp"

#include <boost/math/special_functions/expm1.hpp>
#include <boost/math/special_functions/log1p.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace kirchhoff {

enum class Regime { Subcritical, Critical, Supercritical };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "Subcritical";
        case Regime::Critical: return "Critical";
        case Regime::Supercritical: return "Supercritical";
    }
    return "?";
}

/// Exponents within this distance of 3 are treated as the critical case.
inline constexpr double kCriticalExponentTol = 1e-12;

/// Relative half-width of the band around the fold value in which the two
/// subcritical roots are reported as one fold-degenerate root.
inline constexpr double kFoldBand = 1e-8;

/// Relative root tolerance on t.
inline constexpr double kDefaultRootTol = 1e-13;

/// Cap on bracket doublings/halvings.
inline constexpr int kMaxBracketSteps = 1000;

inline Regime classify(double p) {
    detail::require_exponent(p);
    if (std::abs(p - 3.0) <= kCriticalExponentTol) return Regime::Critical;
    return p > 3.0 ? Regime::Supercritical : Regime::Subcritical;
}

struct KirchhoffScalarProblem {
    double p = 3.0;
    double d = 1.0;
    double wp_l2 = 0.0;  // ||W_p||_2

    void validate() const {
        detail::require_exponent(p);
        detail::require(d > 0.0, "Kirchhoff coefficient d must be positive");
        detail::require(wp_l2 > 0.0 && std::isfinite(wp_l2), "||W_p||_2 must be positive");
    }

    Regime regime() const { return classify(p); }

    /// lambda ||W_p||_2^(1-p)
    double target(double lambda) const { return lambda * std::pow(wp_l2, 1.0 - p); }
};

inline KirchhoffScalarProblem make_scalar_problem(double p, double d) {
    KirchhoffScalarProblem pr{p, d, build_profile(p).l2_norm()};
    pr.validate();
    return pr;
}

struct FoldPoint {
    double t2 = 0.0;
    double nu = 0.0;
};

struct BranchResult {
    Regime regime = Regime::Supercritical;
    double lambda = 0.0;
    double target = 0.0;        // lambda ||W_p||_2^(1-p)
    std::vector<double> roots;  // ascending
    std::optional<FoldPoint> fold;
    bool fold_degenerate = false;
};

namespace detail {

// log(log(d e^u + 1)), safe for large |u|.
template <class Real>
Real log_kirchhoff(const Real& d, const Real& u) {
    using std::exp;
    using std::log;
    const Real z = log(d) + u;
    if (z > 35) return log(z + boost::math::log1p(Real(exp(-z))));
    return log(boost::math::log1p(Real(exp(z))));
}

// log f(e^u)
template <class Real>
Real log_f(const Real& p, const Real& d, const Real& u) {
    return log_kirchhoff(d, u) - (p - 1) / 2 * u;
}

template <class Real>
Real g_value(const Real& p, const Real& d, const Real& t) {
    const Real dt = d * t;
    return -(p - 1) / 2 * boost::math::log1p(dt) + dt / (dt + 1);
}

template <class Real>
Real solve_width(const Real& tol, const Real& a, const Real& b) {
    using std::abs;
    using std::max;
    const Real floor = 16 * std::numeric_limits<Real>::epsilon() * max(Real(1), max(abs(a), abs(b)));
    return max(tol, floor);
}

// Root of F on the side of u0 reached by stepping by `step`; F(u0) must have
// the sign `start_positive`.
template <class Real, class F>
Real march_and_solve(F&& F_, const Real& u0, bool start_positive, const Real& step,
                     const Real& tol, const char* what) {
    auto same_side = [&](const Real& u) { return (F_(u) > 0) == start_positive; };
    auto [a, b] = march_until(same_side, u0, step, kMaxBracketSteps, what);
    if (a > b) std::swap(a, b);
    return bracketed_root<Real>(F_, a, b, solve_width<Real>(tol, a, b), 400, what);
}

template <class Real>
Real fold_t2(const Real& p, const Real& d, const Real& tol) {
    using std::exp;
    using std::log;
    // g rises on (0, t0), falls after, g(0) = 0: its positive zero lies past t0.
    const Real t0 = (3 - p) / (d * (p - 1));
    auto G = [&](const Real& u) { return g_value(p, d, Real(exp(u))); };
    const Real u0 = log(t0);
    return exp(march_and_solve<Real>(G, u0, true, Real(log(Real(2))), tol, "fold bracket"));
}

template <class Real>
struct RootSet {
    std::vector<Real> roots;
    std::optional<Real> t2;
    bool fold_degenerate = false;
};

// Positive roots of f(t) = target for the given regime.
template <class Real>
RootSet<Real> roots_for_target(const Real& p, const Real& d, const Real& target, Regime regime,
                               const Real& tol) {
    using std::exp;
    using std::log;
    RootSet<Real> out;
    const Real log_target = log(target);
    auto F = [&](const Real& u) { return log_f(p, d, u) - log_target; };
    const Real ln2 = log(Real(2));

    auto decreasing_root = [&] {
        const Real u0 = 0;
        const bool pos = F(u0) > 0;
        // f decreasing: above target means the root lies to the right.
        return exp(march_and_solve<Real>(F, u0, pos, pos ? ln2 : Real(-ln2), tol, "branch bracket"));
    };

    switch (regime) {
        case Regime::Supercritical:
            out.roots.push_back(decreasing_root());
            break;
        case Regime::Critical:
            if (target < d) out.roots.push_back(decreasing_root());
            break;
        case Regime::Subcritical: {
            const Real t2 = fold_t2(p, d, tol);
            out.t2 = t2;
            const Real u2 = log(t2);
            const Real peak = F(u2);  // log(f(t2) / target)
            using std::abs;
            // |lambda - nu| <= band * nu  <=>  |target / f(t2) - 1| <= band
            if (abs(Real(boost::math::expm1(Real(-peak)))) <= Real(kFoldBand)) {
                out.roots.push_back(t2);
                out.fold_degenerate = true;
            } else if (peak > 0) {
                out.roots.push_back(exp(march_and_solve<Real>(F, u2, true, Real(-ln2), tol, "lower branch")));
                out.roots.push_back(exp(march_and_solve<Real>(F, u2, true, ln2, tol, "upper branch")));
            }
            break;
        }
    }
    return out;
}

}  // namespace detail

inline double f(const KirchhoffScalarProblem& pr, double t) {
    detail::require(t > 0.0, "f(t) needs t > 0");
    return std::log1p(pr.d * t) / std::pow(t, 0.5 * (pr.p - 1.0));
}

inline double g(const KirchhoffScalarProblem& pr, double t) {
    detail::require(t >= 0.0, "g(t) needs t >= 0");
    return detail::g_value(pr.p, pr.d, t);
}

/// Fold of the subcritical branch: t2 maximises f and nu is the largest
/// lambda with a solution.
inline FoldPoint fold(const KirchhoffScalarProblem& pr, double tol = kDefaultRootTol) {
    pr.validate();
    if (pr.regime() != Regime::Subcritical) {
        throw RegimeError("fold point exists only for 1 < p < 3, got p = " + detail::format_value(pr.p));
    }
    const double p = pr.p;
    const double d = pr.d;
    const double t2 = detail::fold_t2(p, d, tol);
    const double nu = 2.0 / (p - 1.0) * d * std::pow(t2, 0.5 * (3.0 - p)) / (d * t2 + 1.0) *
                      std::pow(pr.wp_l2, p - 1.0);
    return {t2, nu};
}

inline BranchResult solve_branch(const KirchhoffScalarProblem& pr, double lambda,
                                 double tol = kDefaultRootTol) {
    pr.validate();
    detail::require(lambda > 0.0, "lambda must be positive");
    BranchResult br;
    br.regime = pr.regime();
    br.lambda = lambda;
    br.target = pr.target(lambda);
    if (br.regime == Regime::Critical && lambda >= pr.d * pr.wp_l2 * pr.wp_l2) return br;

    auto set = detail::roots_for_target<double>(pr.p, pr.d, br.target, br.regime, tol);
    br.roots = std::move(set.roots);
    br.fold_degenerate = set.fold_degenerate;
    if (br.regime == Regime::Subcritical) br.fold = fold(pr, tol);
    std::sort(br.roots.begin(), br.roots.end());
    return br;
}

/// Scale c with u = c W_p for the branch point t = ||u||_2^2.
inline double amplitude(const KirchhoffScalarProblem& pr, double t) {
    detail::require(t > 0.0, "amplitude needs t > 0");
    return std::sqrt(t) / pr.wp_l2;
}

}  // namespace kirchhoff
