#pragma once

// Report generation behind the command-line tool. `run` never touches
// argv; the executable parses flags into a RunConfig and forwards here, so the
// same code path is exercised by the tests.

#include "kirchhoff/asymptotics.hpp"
#include "kirchhoff/emden_fowler.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/oracle_bvp.hpp"
#include "kirchhoff/reduction.hpp"
#include "kirchhoff/scalar_map.hpp"
#include "kirchhoff/special_integrals.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

namespace kirchhoff::cli {

using Json = nlohmann::ordered_json;

/// Bad flags or inconsistent options; maps to exit status 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Command { integrals, profile, branch, fold, asymptotics, verify };
enum class Format { csv, json };

inline const char* to_string(Command c) {
    switch (c) {
        case Command::integrals: return "integrals";
        case Command::profile: return "profile";
        case Command::branch: return "branch";
        case Command::fold: return "fold";
        case Command::asymptotics: return "asymptotics";
        case Command::verify: return "verify";
    }
    return "?";
}

struct LambdaSweep {
    double min = 0.0;
    double max = 0.0;
    int count = 0;
};

struct RunConfig {
    Command command = Command::branch;
    double p = 3.0;
    std::optional<double> d;
    std::optional<double> a;
    std::optional<double> b;
    double q = 0.0;
    double m = 2.0;
    std::optional<double> lambda;
    std::optional<LambdaSweep> sweep;
    std::optional<std::string> expansion;  // asymptotics: force one expansion tag
    Format format = Format::csv;
    double tol_quad = kDefaultQuadratureTol;
    double tol_root = kDefaultRootTol;
    double tol_fp = 1e-10;
    int grid_n = 101;

    bool has_full_params() const { return a.has_value() || b.has_value(); }

    void validate() const {
        auto need = [](bool ok, const std::string& msg) {
            if (!ok) throw UsageError(msg);
        };
        need(std::isfinite(p) && p > 1.0, "--p must be a finite number > 1");
        need(tol_quad > 0.0 && tol_root > 0.0 && tol_fp > 0.0, "tolerances must be positive");
        need(grid_n >= 3, "--grid-n must be >= 3");
        need(!(lambda && sweep), "give either --lambda or --lambda-sweep, not both");
        if (sweep) {
            need(sweep->min > 0.0 && sweep->min < sweep->max, "--lambda-sweep needs 0 < min < max");
            need(sweep->count >= 2, "--lambda-sweep needs count >= 2");
        }
        if (lambda) need(*lambda > 0.0, "--lambda must be positive");
        need(!(d && has_full_params()), "give either --d or (--a, --b), not both");
        if (d) need(*d > 0.0, "--d must be positive");
        if (a) need(*a >= 0.0, "--a must be >= 0");
        if (b) need(*b > 0.0, "--b must be > 0");
        const bool needs_problem = command == Command::branch || command == Command::fold ||
                                   command == Command::asymptotics || command == Command::verify;
        if (needs_problem) need(d || has_full_params(), "give --d or (--a, --b)");
        if (command == Command::branch || command == Command::asymptotics) {
            need(lambda || sweep, "give --lambda or --lambda-sweep");
        }
        if (command == Command::integrals) {
            need(q >= 0.0, "--q must be >= 0");
            need(m >= 1.0, "--m must be >= 1");
        }
    }
};

/// Shortest decimal string that reads back to the same double.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, res.ptr);
}

inline std::vector<double> lambda_values(const RunConfig& cfg) {
    if (cfg.lambda) return {*cfg.lambda};
    const LambdaSweep& s = *cfg.sweep;
    std::vector<double> out(static_cast<std::size_t>(s.count));
    // base-10 exponents keep decade sweeps on exact powers of ten
    const double lo = std::log10(s.min);
    const double step = (std::log10(s.max) - lo) / (s.count - 1);
    for (int i = 0; i < s.count; ++i) out[i] = std::pow(10.0, lo + step * i);
    out.front() = s.min;
    out.back() = s.max;
    return out;
}

// A table with typed cells, rendered as CSV or as a JSON array of objects.
class Table {
public:
    using Cell = std::variant<double, long long, std::string, bool>;

    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<Cell> row) {
        if (row.size() != columns_.size()) throw std::logic_error("row width mismatch");
        rows_.push_back(std::move(row));
    }

    std::size_t size() const { return rows_.size(); }

    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
        os << '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) os << ',';
                std::visit([&](const auto& v) { os << csv_cell(v); }, row[i]);
            }
            os << '\n';
        }
    }

    Json to_json() const {
        Json arr = Json::array();
        for (const auto& row : rows_) {
            Json obj = Json::object();
            for (std::size_t i = 0; i < row.size(); ++i) {
                std::visit([&](const auto& v) { obj[columns_[i]] = json_cell(v); }, row[i]);
            }
            arr.push_back(std::move(obj));
        }
        return arr;
    }

private:
    static std::string csv_cell(double v) { return format_number(v); }
    static std::string csv_cell(long long v) { return std::to_string(v); }
    static std::string csv_cell(const std::string& v) { return v; }
    static std::string csv_cell(bool v) { return v ? "true" : "false"; }

    // JSON has no NaN/inf; those become null.
    static Json json_cell(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
    static Json json_cell(long long v) { return Json(v); }
    static Json json_cell(const std::string& v) { return Json(v); }
    static Json json_cell(bool v) { return Json(v); }

    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

struct Report {
    Json meta = Json::object();
    Table table{{}};
    bool ok = true;  // verify: all checks passed
};

namespace detail {

struct ResolvedProblem {
    KirchhoffScalarProblem scalar;
    EmdenFowlerProfile profile;
    std::optional<FullProblemParams> full;
};

inline ResolvedProblem resolve(const RunConfig& cfg) {
    EmdenFowlerProfile profile = build_profile(cfg.p, cfg.tol_quad);
    std::optional<FullProblemParams> full;
    double d = 0.0;
    if (cfg.has_full_params()) {
        full = FullProblemParams{cfg.a.value_or(0.0), cfg.b.value_or(1.0), cfg.p};
        full->validate();
        d = full->a * gradient_ratio(cfg.p, cfg.tol_quad) + full->b;
    } else {
        d = *cfg.d;
    }
    KirchhoffScalarProblem pr{cfg.p, d, profile.l2_norm()};
    pr.validate();
    return {pr, std::move(profile), full};
}

inline void problem_meta(Json& meta, const RunConfig& cfg, const ResolvedProblem& rp) {
    meta["p"] = cfg.p;
    if (rp.full) {
        meta["a"] = rp.full->a;
        meta["b"] = rp.full->b;
        meta["d0"] = rp.scalar.d;
    } else {
        meta["d"] = rp.scalar.d;
    }
    meta["regime"] = to_string(rp.scalar.regime());
}

inline Report integrals_report(const RunConfig& cfg) {
    Report r;
    r.meta["p"] = cfg.p;
    r.table = Table({"integral", "p", "index", "value", "error_estimate", "beta_oracle"});
    const double p = cfg.p;
    const auto L = eval_L(p, cfg.q, cfg.tol_quad);
    r.table.add({std::string("L"), p, cfg.q, L.value, L.abs_error_estimate,
                 beta_oracle((cfg.q + 1.0) / (p + 1.0), 0.5) / (p + 1.0)});
    const auto M = eval_M(p, cfg.m, cfg.tol_quad);
    r.table.add({std::string("M"), p, cfg.m, M.value, M.abs_error_estimate,
                 beta_oracle(1.0 / (p + 1.0), (cfg.m + 1.0) / 2.0) / (p + 1.0)});
    return r;
}

inline Report profile_report(const RunConfig& cfg) {
    Report r;
    const EmdenFowlerProfile w = build_profile(cfg.p, cfg.tol_quad);
    r.meta["p"] = cfg.p;
    r.meta["sup_norm"] = w.sup_norm();
    r.meta["l2_norm_sq"] = w.l2_norm_sq();
    r.meta["grad_l2_norm_sq"] = w.grad_l2_norm_sq();
    r.table = Table({"x", "W", "dW"});
    const int n = cfg.grid_n;
    for (int i = 0; i < n; ++i) {
        const double x = i == n - 1 ? 1.0 : static_cast<double>(i) / (n - 1);
        r.table.add({x, w.evaluate(x), w.derivative(x)});
    }
    return r;
}

inline Report branch_report(const RunConfig& cfg) {
    Report r;
    const ResolvedProblem rp = resolve(cfg);
    problem_meta(r.meta, cfg, rp);
    std::vector<std::string> cols{"lambda", "t", "amplitude", "sup_norm", "l2_norm", "regime",
                                  "root_index"};
    if (rp.full) cols.push_back("d0");
    r.table = Table(cols);
    Json counts = Json::array();
    std::vector<double> lambdas = lambda_values(cfg);
    std::sort(lambdas.begin(), lambdas.end());
    for (double lambda : lambdas) {
        const BranchResult br = solve_branch(rp.scalar, lambda, cfg.tol_root);
        for (std::size_t i = 0; i < br.roots.size(); ++i) {
            const double t = br.roots[i];
            const double amp = amplitude(rp.scalar, t);
            std::vector<Table::Cell> row{lambda, t, amp, amp * rp.profile.sup_norm(), std::sqrt(t),
                                         std::string(to_string(br.regime)),
                                         static_cast<long long>(i)};
            if (rp.full) row.emplace_back(rp.scalar.d);
            r.table.add(std::move(row));
        }
        Json c = Json::object();
        c["lambda"] = lambda;
        c["root_count"] = br.roots.size();
        c["fold_degenerate"] = br.fold_degenerate;
        counts.push_back(std::move(c));
    }
    r.meta["counts"] = std::move(counts);
    return r;
}

inline Report fold_report(const RunConfig& cfg) {
    Report r;
    const ResolvedProblem rp = resolve(cfg);
    problem_meta(r.meta, cfg, rp);
    const FoldPoint fp = fold(rp.scalar, cfg.tol_root);
    std::vector<std::string> cols{"t2", "nu"};
    if (rp.full) cols.push_back("d0");
    r.table = Table(cols);
    std::vector<Table::Cell> row{fp.t2, fp.nu};
    if (rp.full) row.emplace_back(rp.scalar.d);
    r.table.add(std::move(row));
    return r;
}

inline ExpansionTag parse_tag(const std::string& name) {
    for (ExpansionTag t : {ExpansionTag::P_gt3_large_lambda, ExpansionTag::P_gt3_small_lambda,
                           ExpansionTag::P_lt3_lower_small_lambda,
                           ExpansionTag::P_lt3_upper_small_lambda, ExpansionTag::P_eq3_near_fold,
                           ExpansionTag::P_eq3_small_lambda}) {
        if (name == to_string(t)) return t;
    }
    throw UsageError("unknown expansion '" + name + "'");
}

// Expansions that apply at lambda when none is forced.
inline std::vector<ExpansionTag> default_tags(const KirchhoffScalarProblem& pr, double lambda) {
    switch (pr.regime()) {
        case Regime::Supercritical:
            return {lambda >= 1.0 ? ExpansionTag::P_gt3_large_lambda : ExpansionTag::P_gt3_small_lambda};
        case Regime::Critical:
            return {predict_critical(pr, lambda).regime_tag};
        case Regime::Subcritical:
            return {ExpansionTag::P_lt3_lower_small_lambda, ExpansionTag::P_lt3_upper_small_lambda};
    }
    return {};
}

inline Report asymptotics_report(const RunConfig& cfg) {
    Report r;
    const ResolvedProblem rp = resolve(cfg);
    problem_meta(r.meta, cfg, rp);
    r.table = Table({"lambda", "expansion", "exact", "leading", "with_correction", "correction",
                     "rel_error", "error_ratio"});
    std::vector<double> lambdas = lambda_values(cfg);
    std::sort(lambdas.begin(), lambdas.end());
    for (double lambda : lambdas) {
        const std::vector<ExpansionTag> tags =
            cfg.expansion ? std::vector<ExpansionTag>{parse_tag(*cfg.expansion)}
                          : default_tags(rp.scalar, lambda);
        for (ExpansionTag tag : tags) {
            const AsymptoticComparison c = compare_with_exact(rp.scalar, lambda, tag);
            r.table.add({lambda, std::string(to_string(tag)), c.exact, c.leading, c.with_correction,
                         c.correction, c.rel_error, c.error_ratio});
        }
    }
    return r;
}

inline Report verify_report(const RunConfig& cfg) {
    constexpr double kOracleTol = 1e-6;
    Report r;
    const ResolvedProblem rp = resolve(cfg);
    problem_meta(r.meta, cfg, rp);
    r.table = Table({"check", "lambda", "deviation", "tolerance", "pass"});
    auto record = [&](const std::string& name, double lambda, double dev, double tol) {
        const bool pass = std::isfinite(dev) && dev <= tol;
        r.ok = r.ok && pass;
        r.table.add({name, lambda, dev, tol, pass});
    };

    // Unit-coefficient shot against the closed-form profile.
    ShootingOptions shoot;
    const OracleSolution ground = shoot_frozen(1.0, 1.0, cfg.p, shoot);
    record("ground_sup_norm", 1.0, std::abs(ground.sup_norm / rp.profile.sup_norm() - 1.0), kOracleTol);
    record("ground_l2_norm_sq", 1.0, std::abs(ground.l2_sq / rp.profile.l2_norm_sq() - 1.0), kOracleTol);

    std::vector<double> lambdas;
    if (cfg.lambda || cfg.sweep) {
        lambdas = lambda_values(cfg);
    } else {
        switch (rp.scalar.regime()) {
            case Regime::Supercritical: lambdas = {1.0}; break;
            case Regime::Critical: lambdas = {0.5 * rp.scalar.d * rp.profile.l2_norm_sq()}; break;
            case Regime::Subcritical: lambdas = {0.5 * fold(rp.scalar, cfg.tol_root).nu}; break;
        }
    }
    std::sort(lambdas.begin(), lambdas.end());

    const FullProblemParams full = rp.full.value_or(FullProblemParams{0.0, rp.scalar.d, cfg.p});
    const double ratio = gradient_ratio(cfg.p, cfg.tol_quad);
    NonlocalOptions nl;
    nl.tol = cfg.tol_fp;
    for (double lambda : lambdas) {
        const BranchResult br = solve_branch(rp.scalar, lambda, cfg.tol_root);
        for (double t : br.roots) {
            // Start on the same side of the fold as the target root.
            double t_init = t;
            if (br.fold) t_init = t < br.fold->t2 ? br.fold->t2 / 10.0 : 10.0 * br.fold->t2;
            const OracleSolution sol = solve_nonlocal(full, lambda, t_init, nl);
            const double closed_sup = amplitude(rp.scalar, t) * rp.profile.sup_norm();
            record("nonlocal_sup_norm", lambda, std::abs(sol.sup_norm / closed_sup - 1.0), kOracleTol);
            record("norm_ratio", lambda, std::abs(sol.grad_l2_sq / sol.l2_sq / ratio - 1.0), kOracleTol);
            record("fixed_point_residual", lambda, sol.fixed_point_residual, 1e3 * cfg.tol_fp);
        }
    }
    return r;
}

}  // namespace detail

inline Report build_report(const RunConfig& cfg) {
    cfg.validate();
    switch (cfg.command) {
        case Command::integrals: return detail::integrals_report(cfg);
        case Command::profile: return detail::profile_report(cfg);
        case Command::branch: return detail::branch_report(cfg);
        case Command::fold: return detail::fold_report(cfg);
        case Command::asymptotics: return detail::asymptotics_report(cfg);
        case Command::verify: return detail::verify_report(cfg);
    }
    throw UsageError("unknown command");
}

inline void write_report(const Report& rep, const RunConfig& cfg, std::ostream& out) {
    if (cfg.format == Format::csv) {
        rep.table.write_csv(out);
        return;
    }
    Json doc = Json::object();
    doc["command"] = to_string(cfg.command);
    doc["meta"] = rep.meta;
    doc["records"] = rep.table.to_json();
    if (cfg.command == Command::verify) doc["pass"] = rep.ok;
    out << doc.dump(2) << '\n';
}

/// Exit status: 0 success, 1 numerical failure or failed verification,
/// 2 usage error.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    auto diagnostic = [&](const char* kind, const std::exception& e) {
        Json d = Json::object();
        d["error"] = kind;
        d["message"] = e.what();
        err << d.dump() << '\n';
    };
    try {
        const Report rep = build_report(cfg);
        write_report(rep, cfg, out);
        return rep.ok ? 0 : 1;
    } catch (const UsageError& e) {
        diagnostic("usage", e);
        return 2;
    } catch (const DomainError& e) {
        diagnostic("domain", e);
        return 2;
    } catch (const RegimeError& e) {
        diagnostic("regime", e);
        return 1;
    } catch (const ConvergenceError& e) {
        diagnostic("convergence", e);
        return 1;
    } catch (const DegenerateError& e) {
        diagnostic("degenerate", e);
        return 1;
    } catch (const BlowupError& e) {
        diagnostic("blowup", e);
        return 1;
    } catch (const std::exception& e) {
        diagnostic("numerical", e);
        return 1;
    }
}

}  // namespace kirchhoff::cli
