#pragma once

// First-order asymptotic expansions of the branch scale c (u = c W_p) and
// their comparison with the exact branch.
//
// Each expansion is `leading * (1 + correction)`. With tau = lambda ||W||^(1-p),
// W = ||W_p||_2 and Lg = log(1/lambda):
//
//   P_gt3_large_lambda, P_lt3_lower_small_lambda  (t -> 0 along a power law)
//     leading    = (tau/d)^(1/(3-p)) / W
//     correction = d^((1-p)/(3-p)) tau^(2/(3-p)) / (2(3-p))
//
//   P_gt3_small_lambda, P_lt3_upper_small_lambda, P_eq3_small_lambda  (t -> inf)
//     leading    = (2/(p-1))^(1/(p-1)) lambda^(-1/(p-1)) Lg^(1/(p-1))
//     correction = log(Lg) / ((p-1) Lg)
//
//   P_eq3_near_fold  (eps = d - lambda / W^2 -> 0)
//     leading    = sqrt(2 eps) / (d W)
//     correction = 2 eps / (3 d)
//
// The near-fold correction carries 1/d: expanding log(1 + dt)/t = d - eps to
// second order gives t = 2 eps/d^2 + 8 eps^2/(3 d^3), so sqrt(t) picks up
// 1 + 2 eps/(3d). For d = 1 this is the familiar 1 + (2/3) eps.
//
// The gaps between exact and predicted scales shrink to 1e-30 and below, far
// under double precision, so `compare_with_exact` re-solves the scalar
// equation in extended precision.

#include "kirchhoff/errors.hpp"
#include "kirchhoff/scalar_map.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <string>
#include <utility>

namespace kirchhoff {

enum class ExpansionTag {
    P_gt3_large_lambda,
    P_gt3_small_lambda,
    P_lt3_lower_small_lambda,
    P_lt3_upper_small_lambda,
    P_eq3_near_fold,
    P_eq3_small_lambda,
};

inline const char* to_string(ExpansionTag tag) {
    switch (tag) {
        case ExpansionTag::P_gt3_large_lambda: return "P_gt3_large_lambda";
        case ExpansionTag::P_gt3_small_lambda: return "P_gt3_small_lambda";
        case ExpansionTag::P_lt3_lower_small_lambda: return "P_lt3_lower_small_lambda";
        case ExpansionTag::P_lt3_upper_small_lambda: return "P_lt3_upper_small_lambda";
        case ExpansionTag::P_eq3_near_fold: return "P_eq3_near_fold";
        case ExpansionTag::P_eq3_small_lambda: return "P_eq3_small_lambda";
    }
    return "?";
}

struct AsymptoticPrediction {
    ExpansionTag regime_tag = ExpansionTag::P_gt3_large_lambda;
    double leading = 0.0;
    double correction = 0.0;
    double with_correction = 0.0;
};

/// Smallest |correction| for which `error_ratio` is reported in double precision.
inline constexpr double kMinCorrection = 1e-15;

using ExtendedReal = boost::multiprecision::cpp_bin_float_50;

namespace detail {

template <class Real>
struct Expansion {
    Real leading;
    Real correction;
};

inline void require_expansion_regime(ExpansionTag tag, const KirchhoffScalarProblem& pr,
                                     double lambda) {
    pr.validate();
    require(lambda > 0.0, "lambda must be positive");
    const Regime regime = pr.regime();
    const auto fail = [&](const char* need) {
        throw RegimeError(std::string(to_string(tag)) + " requires " + need +
                          ", got p = " + detail::format_value(pr.p));
    };
    switch (tag) {
        case ExpansionTag::P_gt3_large_lambda:
        case ExpansionTag::P_gt3_small_lambda:
            if (regime != Regime::Supercritical) fail("p > 3");
            break;
        case ExpansionTag::P_lt3_lower_small_lambda:
        case ExpansionTag::P_lt3_upper_small_lambda:
            if (regime != Regime::Subcritical) fail("1 < p < 3");
            break;
        case ExpansionTag::P_eq3_near_fold:
        case ExpansionTag::P_eq3_small_lambda:
            if (regime != Regime::Critical) fail("p = 3");
            if (lambda >= pr.d * pr.wp_l2 * pr.wp_l2) {
                throw RegimeError("p = 3 expansions need lambda < d ||W_3||_2^2");
            }
            break;
    }
    const bool small_lambda = tag == ExpansionTag::P_gt3_small_lambda ||
                              tag == ExpansionTag::P_lt3_upper_small_lambda ||
                              tag == ExpansionTag::P_eq3_small_lambda;
    if (small_lambda && !(std::log(1.0 / lambda) > 1.0)) {
        throw RegimeError(std::string(to_string(tag)) + " needs log(1/lambda) > 1");
    }
}

template <class Real>
Expansion<Real> expansion(ExpansionTag tag, const Real& p, const Real& d, const Real& W,
                          const Real& lambda) {
    using std::log;
    using std::pow;
    using std::sqrt;
    switch (tag) {
        case ExpansionTag::P_gt3_large_lambda:
        case ExpansionTag::P_lt3_lower_small_lambda: {
            const Real tau = lambda * pow(W, 1 - p);
            return {pow(tau / d, 1 / (3 - p)) / W,
                    pow(d, (1 - p) / (3 - p)) * pow(tau, 2 / (3 - p)) / (2 * (3 - p))};
        }
        case ExpansionTag::P_gt3_small_lambda:
        case ExpansionTag::P_lt3_upper_small_lambda:
        case ExpansionTag::P_eq3_small_lambda: {
            const Real Lg = log(1 / lambda);
            return {pow(2 / (p - 1), 1 / (p - 1)) * pow(lambda, -1 / (p - 1)) * pow(Lg, 1 / (p - 1)),
                    log(Lg) / ((p - 1) * Lg)};
        }
        case ExpansionTag::P_eq3_near_fold: {
            const Real eps = d - lambda / (W * W);
            return {sqrt(2 * eps) / (d * W), 2 * eps / (3 * d)};
        }
    }
    return {Real(0), Real(0)};
}

inline AsymptoticPrediction make_prediction(ExpansionTag tag, const KirchhoffScalarProblem& pr,
                                            double lambda) {
    require_expansion_regime(tag, pr, lambda);
    const auto e = expansion<double>(tag, pr.p, pr.d, pr.wp_l2, lambda);
    return {tag, e.leading, e.correction, e.leading * (1.0 + e.correction)};
}

}  // namespace detail

inline AsymptoticPrediction predict_supercritical_large(const KirchhoffScalarProblem& pr,
                                                        double lambda) {
    return detail::make_prediction(ExpansionTag::P_gt3_large_lambda, pr, lambda);
}

inline AsymptoticPrediction predict_supercritical_small(const KirchhoffScalarProblem& pr,
                                                        double lambda) {
    return detail::make_prediction(ExpansionTag::P_gt3_small_lambda, pr, lambda);
}

/// Lower (t -> 0) and upper (t -> inf) subcritical branches as lambda -> 0.
inline std::pair<AsymptoticPrediction, AsymptoticPrediction> predict_subcritical_pair(
    const KirchhoffScalarProblem& pr, double lambda) {
    return {detail::make_prediction(ExpansionTag::P_lt3_lower_small_lambda, pr, lambda),
            detail::make_prediction(ExpansionTag::P_lt3_upper_small_lambda, pr, lambda)};
}

inline AsymptoticPrediction predict_critical_near_fold(const KirchhoffScalarProblem& pr,
                                                       double lambda) {
    return detail::make_prediction(ExpansionTag::P_eq3_near_fold, pr, lambda);
}

inline AsymptoticPrediction predict_critical_small(const KirchhoffScalarProblem& pr,
                                                   double lambda) {
    return detail::make_prediction(ExpansionTag::P_eq3_small_lambda, pr, lambda);
}

/// p = 3: the near-fold expansion above half the threshold, small-lambda below.
inline AsymptoticPrediction predict_critical(const KirchhoffScalarProblem& pr, double lambda) {
    pr.validate();
    const double threshold = pr.d * pr.wp_l2 * pr.wp_l2;
    return lambda > 0.5 * threshold ? predict_critical_near_fold(pr, lambda)
                                    : predict_critical_small(pr, lambda);
}

inline AsymptoticPrediction predict(ExpansionTag tag, const KirchhoffScalarProblem& pr,
                                    double lambda) {
    return detail::make_prediction(tag, pr, lambda);
}

/// Leading-order branch point t, the t-space form of each expansion.
inline double predicted_t(ExpansionTag tag, const KirchhoffScalarProblem& pr, double lambda) {
    detail::require_expansion_regime(tag, pr, lambda);
    const double p = pr.p;
    const double d = pr.d;
    const double W = pr.wp_l2;
    switch (tag) {
        case ExpansionTag::P_gt3_large_lambda:
        case ExpansionTag::P_lt3_lower_small_lambda:
            return std::pow(pr.target(lambda) / d, 2.0 / (3.0 - p));
        case ExpansionTag::P_gt3_small_lambda:
        case ExpansionTag::P_lt3_upper_small_lambda:
        case ExpansionTag::P_eq3_small_lambda: {
            const double C = std::pow(2.0 / (p - 1.0), 2.0 / (p - 1.0)) * W * W;
            return C * std::pow(lambda, -2.0 / (p - 1.0)) *
                   std::pow(std::log(1.0 / lambda), 2.0 / (p - 1.0));
        }
        case ExpansionTag::P_eq3_near_fold:
            return 2.0 / (d * d) * (d - lambda / (W * W));
    }
    return 0.0;
}

/// (exact / leading - 1) / correction; tends to 1 when the first-order term is right.
inline double error_ratio(const AsymptoticPrediction& pred, double exact_scale) {
    detail::require(exact_scale > 0.0, "exact scale must be positive");
    if (std::abs(pred.correction) < kMinCorrection) {
        throw DegenerateError("correction term below " + detail::format_value(kMinCorrection));
    }
    return (exact_scale / pred.leading - 1.0) / pred.correction;
}

struct AsymptoticComparison {
    ExpansionTag regime_tag = ExpansionTag::P_gt3_large_lambda;
    double lambda = 0.0;
    double exact = 0.0;            // sqrt(t) / ||W_p||_2 from the exact root
    double leading = 0.0;
    double with_correction = 0.0;
    double correction = 0.0;
    double rel_error = 0.0;        // |exact / with_correction - 1|
    double error_ratio = 0.0;      // (exact / leading - 1) / correction
};

/// Compares an expansion with the exact branch, solving f(t) = target and
/// forming every difference in `Real` before rounding to double.
template <class Real = ExtendedReal>
AsymptoticComparison compare_with_exact(const KirchhoffScalarProblem& pr, double lambda,
                                        ExpansionTag tag) {
    using std::abs;
    using std::pow;
    using std::sqrt;
    detail::require_expansion_regime(tag, pr, lambda);

    const Real p = pr.p;
    const Real d = pr.d;
    const Real W = pr.wp_l2;
    const Real lam = lambda;
    const Real target = lam * pow(W, 1 - p);
    const Real tol = 1e3 * std::numeric_limits<Real>::epsilon();

    auto set = detail::roots_for_target<Real>(p, d, target, pr.regime(), tol);
    if (set.roots.empty() || set.fold_degenerate) {
        throw RegimeError(std::string(to_string(tag)) + ": no isolated branch point at this lambda");
    }
    std::sort(set.roots.begin(), set.roots.end());
    const Real t = tag == ExpansionTag::P_lt3_upper_small_lambda ? set.roots.back() : set.roots.front();

    const auto e = detail::expansion<Real>(tag, p, d, W, lam);
    const Real exact = sqrt(t) / W;
    const Real ratio_m1 = exact / e.leading - 1;
    const Real with_corr = e.leading * (1 + e.correction);

    AsymptoticComparison out;
    out.regime_tag = tag;
    out.lambda = lambda;
    out.exact = static_cast<double>(exact);
    out.leading = static_cast<double>(e.leading);
    out.with_correction = static_cast<double>(with_corr);
    out.correction = static_cast<double>(e.correction);
    out.rel_error = static_cast<double>(abs((ratio_m1 - e.correction) / (1 + e.correction)));
    if (abs(e.correction) < 1e6 * tol) {
        throw DegenerateError("correction term below working precision");
    }
    out.error_ratio = static_cast<double>(ratio_m1 / e.correction);
    return out;
}

}  // namespace kirchhoff
