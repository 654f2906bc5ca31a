#pragma once

// Independent boundary-value oracle. Nothing here uses the closed forms of
// W_p: the frozen-coefficient problem c (-u'') = lambda u^p is shot from x = 0
// with fixed-step RK4, and the nonlocal coefficient is found by iterating on
// the shot norms.
//
// Fixed-point structure. For a coefficient c, the shot solution u_c has
// norms N(c) = ||u_c||^2 and G(c) = ||u_c'||^2, and the nonlocal problem asks
// for c = Phi(c) = log(a G(c) + b N(c) + 1). In s = log c the residual
// r(s) = log Phi(e^s) - s is concave with its peak at the subcritical fold.
// The root left of the peak (lower subcritical branch) repels the plain
// iteration c <- Phi(c) for any damping, so the default scheme is a
// safeguarded secant/Newton iteration on r(s), which converges to the root on
// the side of the peak where it starts. The damped scheme (with Aitken
// extrapolation every third step) is kept as the alternative.

#include "kirchhoff/detail/quadrature.hpp"
#include "kirchhoff/detail/roots.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/reduction.hpp"
#include "kirchhoff/scalar_map.hpp"

#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace kirchhoff {

struct OracleSolution {
    double slope0 = 0.0;           // u'(0)
    std::vector<double> x;         // uniform grid on [0, 1]
    std::vector<double> u;
    std::vector<double> du;        // u'
    double l2_sq = 0.0;            // ||u||_2^2 (Simpson)
    double grad_l2_sq = 0.0;       // ||u'||_2^2 (Simpson)
    double coeff = 0.0;            // frozen coefficient c
    double residual = 0.0;         // |u(1)|
    double sup_norm = 0.0;
    double lambda = 0.0;
    double p = 0.0;
    int iterations = 0;            // fixed-point iterations (0 for a plain shot)
    double fixed_point_residual = 0.0;  // |Phi(c) - c|
};

struct ShootingOptions {
    int n_steps = 4096;            // RK4 steps (even); the grid has n_steps + 1 points
    double bc_tol = 1e-10;         // |u(1)| <= bc_tol * max(1, ||u||_inf)
    double blowup = 1e12;
    double slope_hint = 0.0;       // starting guess for u'(0); 0 means 1
};

enum class FixedPointScheme { secant, damped };

struct NonlocalOptions {
    ShootingOptions shooting;
    FixedPointScheme scheme = FixedPointScheme::secant;
    double tol = 1e-10;            // |t_{k+1} - t_k| <= tol * max(1, t_k)
    double damping = 0.5;          // damped scheme only
    int max_iter = 200;
};

namespace detail {

using OdeState = std::array<double, 2>;

struct ShotTrace {
    double end = 0.0;              // u(1)
    double min_interior = 0.0;     // min u over grid points 1..n
    bool crossed = false;          // u <= 0 at some interior grid point
};

class FrozenShooter {
public:
    FrozenShooter(double k, double p, int n_steps, double blowup)
        : k_(k), p_(p), n_(n_steps), h_(1.0 / n_steps), blowup_(blowup) {}

    ShotTrace trace(double slope, std::vector<double>* u = nullptr,
                    std::vector<double>* du = nullptr) const {
        OdeState y{0.0, slope};
        if (u) {
            u->assign(static_cast<std::size_t>(n_) + 1, 0.0);
            du->assign(static_cast<std::size_t>(n_) + 1, 0.0);
            (*du)[0] = slope;
        }
        ShotTrace tr;
        tr.min_interior = std::numeric_limits<double>::infinity();
        const auto rhs = [this](const OdeState& s, OdeState& ds, double) {
            ds[0] = s[1];
            ds[1] = -k_ * std::pow(std::abs(s[0]), p_ - 1.0) * s[0];
        };
        boost::numeric::odeint::runge_kutta4<OdeState> stepper;
        for (int i = 1; i <= n_; ++i) {
            stepper.do_step(rhs, y, (i - 1) * h_, h_);
            if (!(std::abs(y[0]) <= blowup_) || !std::isfinite(y[1])) {
                throw BlowupError("shooting trajectory exceeded the overflow guard");
            }
            if (u) {
                (*u)[i] = y[0];
                (*du)[i] = y[1];
            }
            tr.min_interior = std::min(tr.min_interior, y[0]);
            if (i < n_ && y[0] <= 0.0) tr.crossed = true;
        }
        tr.end = y[0];
        return tr;
    }

    // Positive when the slope is too small, negative when too large; continuous
    // through the solution slope.
    double residual(double slope) const {
        const ShotTrace tr = trace(slope);
        return tr.crossed ? tr.min_interior : tr.end;
    }

private:
    double k_;
    double p_;
    int n_;
    double h_;
    double blowup_;
};

}  // namespace detail

/// Solves c (-u'') = lambda u^p, u(0) = u(1) = 0, u > 0, by shooting on u'(0).
inline OracleSolution shoot_frozen(double c, double lambda, double p, const ShootingOptions& opt = {}) {
    detail::require(c > 0.0, "coefficient c must be positive");
    detail::require(lambda > 0.0, "lambda must be positive");
    detail::require_exponent(p);
    detail::require(opt.n_steps >= 128 && opt.n_steps % 2 == 0, "n_steps must be even and >= 128");

    const detail::FrozenShooter shooter(lambda / c, p, opt.n_steps, opt.blowup);
    const auto r = [&](double log_slope) { return shooter.residual(std::exp(log_slope)); };

    const double s0 = std::log(opt.slope_hint > 0.0 ? opt.slope_hint : 1.0);
    const double r0 = r(s0);
    const bool too_small = r0 > 0.0;
    const double step = too_small ? std::log(2.0) : -std::log(2.0);
    auto [a, b] = detail::march_until([&](double s) { return (r(s) > 0.0) == too_small; }, s0,
                                      step, 2000, "shooting bracket");
    if (a > b) std::swap(a, b);
    const double log_slope =
        detail::bracketed_root<double>(r, a, b, detail::solve_width<double>(1e-15, a, b), 200,
                                       "shooting");

    OracleSolution sol;
    sol.slope0 = std::exp(log_slope);
    shooter.trace(sol.slope0, &sol.u, &sol.du);
    const double h = 1.0 / opt.n_steps;
    sol.x.resize(sol.u.size());
    for (std::size_t i = 0; i < sol.x.size(); ++i) sol.x[i] = static_cast<double>(i) * h;

    std::vector<double> sq(sol.u.size());
    std::transform(sol.u.begin(), sol.u.end(), sq.begin(), [](double v) { return v * v; });
    sol.l2_sq = detail::simpson(sq, h);
    std::transform(sol.du.begin(), sol.du.end(), sq.begin(), [](double v) { return v * v; });
    sol.grad_l2_sq = detail::simpson(sq, h);
    sol.sup_norm = *std::max_element(sol.u.begin(), sol.u.end());
    sol.residual = std::abs(sol.u.back());
    sol.coeff = c;
    sol.lambda = lambda;
    sol.p = p;
    if (!(sol.residual <= opt.bc_tol * std::max(1.0, sol.sup_norm))) {
        throw ConvergenceError("shooting: boundary residual " + detail::format_value(sol.residual) +
                               " above tolerance");
    }
    return sol;
}

namespace detail {

class CoefficientMap {
public:
    CoefficientMap(const FullProblemParams& full, double lambda, const ShootingOptions& opt)
        : full_(full), lambda_(lambda), opt_(opt) {}

    OracleSolution shot(double c) {
        opt_.slope_hint = last_slope_;
        OracleSolution s = shoot_frozen(c, lambda_, full_.p, opt_);
        last_slope_ = s.slope0;
        return s;
    }

    double phi(const OracleSolution& s) const {
        return std::log1p(full_.a * s.grad_l2_sq + full_.b * s.l2_sq);
    }

private:
    FullProblemParams full_;
    double lambda_;
    ShootingOptions opt_;
    double last_slope_ = 0.0;
};

// Smallest and largest coefficient the iteration may visit. c = log(D t + 1),
// so c above ~700 means t beyond double range.
inline constexpr double kMinLogCoeff = -460.0;  // c ~ 1e-200
inline constexpr double kMaxLogCoeff = 6.55;    // c ~ 700

[[noreturn]] inline void report_divergence(const FullProblemParams& full, double lambda,
                                           const std::string& why) {
    const KirchhoffScalarProblem pr = reduce(full);
    bool beyond = false;
    if (pr.regime() == Regime::Critical) beyond = lambda >= pr.d * pr.wp_l2 * pr.wp_l2;
    if (pr.regime() == Regime::Subcritical) beyond = lambda > fold(pr).nu;
    if (beyond) {
        throw RegimeError("no solution (consistent with theory): " + why);
    }
    throw ConvergenceError("nonlocal fixed point: " + why);
}

inline bool t_converged(double t_new, double t_old, double tol) {
    return std::abs(t_new - t_old) <= tol * std::max(1.0, t_old);
}

}  // namespace detail

/// Solves the nonlocal problem with coefficient log(a ||u'||^2 + b ||u||^2 + 1).
/// `t_init` is a starting guess for ||u||_2^2.
inline OracleSolution solve_nonlocal(const FullProblemParams& full, double lambda, double t_init,
                                     const NonlocalOptions& opt = {}) {
    full.validate();
    detail::require(lambda > 0.0, "lambda must be positive");
    detail::require(t_init > 0.0, "t_init must be positive");
    detail::require(opt.tol > 0.0, "fixed-point tolerance must be positive");
    detail::require(opt.damping > 0.0 && opt.damping <= 1.0, "damping must lie in (0, 1]");

    detail::CoefficientMap map(full, lambda, opt.shooting);

    // Starting coefficient: the one whose shot has ||u||^2 = t_init. Only lambda / c
    // enters the frozen problem, so ||u_c||^2 scales as c^{2/(p-1)} and one pilot
    // shot fixes it. This keeps the start on the same side of the fold as t_init.
    double c0 = std::log1p(full.b * t_init);
    {
        const OracleSolution pilot = map.shot(c0 > 0.0 ? c0 : 1.0);
        c0 = pilot.coeff * std::pow(t_init / pilot.l2_sq, 0.5 * (full.p - 1.0));
    }

    auto finish = [&](OracleSolution s, int iters) {
        s.iterations = iters;
        s.fixed_point_residual = std::abs(map.phi(s) - s.coeff);
        return s;
    };
    auto in_range = [](double log_c) {
        return std::isfinite(log_c) && log_c > detail::kMinLogCoeff && log_c < detail::kMaxLogCoeff;
    };

    if (opt.scheme == FixedPointScheme::damped) {
        double c = c0;
        double theta = opt.damping;
        double prev_step = 0.0;
        OracleSolution cur = map.shot(c);
        std::vector<double> history{c};
        for (int k = 1; k <= opt.max_iter; ++k) {
            const double step = map.phi(cur) - c;
            if (prev_step != 0.0 && step * prev_step < 0.0 && std::abs(step) > 0.5 * std::abs(prev_step)) {
                theta *= 0.5;  // oscillation
            }
            prev_step = step;
            double next = c + theta * step;
            history.push_back(next);
            // Aitken extrapolation on the last three iterates
            if (history.size() >= 3 && k % 3 == 0) {
                const double x0 = history[history.size() - 3];
                const double x1 = history[history.size() - 2];
                const double x2 = history.back();
                const double denom = x2 - 2.0 * x1 + x0;
                if (denom != 0.0) {
                    const double acc = x2 - (x2 - x1) * (x2 - x1) / denom;
                    if (acc > 0.0 && std::isfinite(acc)) next = acc;
                }
            }
            if (!in_range(std::log(next))) {
                detail::report_divergence(full, lambda, "damped iteration left the admissible range");
            }
            OracleSolution nxt = map.shot(next);
            if (detail::t_converged(nxt.l2_sq, cur.l2_sq, opt.tol)) return finish(std::move(nxt), k);
            c = next;
            cur = std::move(nxt);
        }
        detail::report_divergence(full, lambda, "damped iteration budget exhausted");
    }

    // Safeguarded Newton on r(s) = log Phi(e^s) - s with a finite-difference slope.
    auto residual_at = [&](double s, OracleSolution* keep) {
        OracleSolution sh = map.shot(std::exp(s));
        const double ph = map.phi(sh);
        const double r = ph > 0.0 ? std::log(ph) - s : -std::numeric_limits<double>::infinity();
        if (keep) *keep = std::move(sh);
        return r;
    };
    constexpr double kFd = 1e-6;
    constexpr double kMaxStep = 20.0;

    double s = std::log(c0);
    double lo = -std::numeric_limits<double>::infinity();  // r(lo) > 0 side markers
    double hi = std::numeric_limits<double>::infinity();
    bool have_bracket = false;
    double r_lo = 0.0;
    OracleSolution cur;
    double r = residual_at(s, &cur);
    for (int k = 1; k <= opt.max_iter; ++k) {
        if (!std::isfinite(r)) detail::report_divergence(full, lambda, "coefficient map underflowed");
        const double slope = (residual_at(s + kFd, nullptr) - r) / kFd;
        if (!have_bracket && std::abs(slope) * kMaxStep < 1e-3 * std::abs(r)) {
            // r is flat and away from zero: the coefficient map has no fixed point nearby
            detail::report_divergence(full, lambda, "residual plateau without a sign change");
        }
        double step = (slope != 0.0 && std::isfinite(slope)) ? -r / slope : (r > 0 ? kMaxStep : -kMaxStep);
        step = std::clamp(step, -kMaxStep, kMaxStep);
        double next = s + step;
        if (have_bracket && !(next > std::min(lo, hi) && next < std::max(lo, hi))) {
            next = 0.5 * (lo + hi);
        }
        if (!in_range(next) && std::isfinite(next)) {
            // approach the edge of the range by halves instead of jumping out
            const double edge = next > s ? detail::kMaxLogCoeff : detail::kMinLogCoeff;
            next = 0.5 * (s + edge);
            if (std::abs(edge - s) < 1e-3) {
                detail::report_divergence(full, lambda, "secant iteration left the admissible range");
            }
        }
        if (!in_range(next)) detail::report_divergence(full, lambda, "secant iteration left the admissible range");

        OracleSolution nxt;
        const double r_next = residual_at(next, &nxt);
        if (std::isfinite(r_next) && (r_next > 0.0) != (r > 0.0)) {
            // keep the newest sign-change pair as the safeguard bracket
            lo = s;
            r_lo = r;
            hi = next;
            have_bracket = true;
        } else if (have_bracket && std::isfinite(r_next)) {
            if ((r_next > 0.0) == (r_lo > 0.0)) {
                lo = next;
                r_lo = r_next;
            } else {
                hi = next;
            }
        }
        if (detail::t_converged(nxt.l2_sq, cur.l2_sq, opt.tol) && std::abs(r_next) <= 1e3 * opt.tol) {
            return finish(std::move(nxt), k);
        }
        s = next;
        r = r_next;
        cur = std::move(nxt);
    }
    detail::report_divergence(full, lambda, "secant iteration budget exhausted");
}

/// Reduced problem (a = 0, b = d).
inline OracleSolution solve_nonlocal(const KirchhoffScalarProblem& pr, double lambda, double t_init,
                                     const NonlocalOptions& opt = {}) {
    return solve_nonlocal(FullProblemParams{0.0, pr.d, pr.p}, lambda, t_init, opt);
}

}  // namespace kirchhoff
