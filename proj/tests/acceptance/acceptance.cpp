// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "kirchhoff/cli.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace kirchhoff;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

void note(Outcome& o, bool ok, const std::string& what) {
    if (!ok) {
        o.pass = false;
        std::printf("    fail: %s\n", what.c_str());
    }
}

// Guards each criterion so that a thrown error is a FAIL, not an abort.
Outcome guarded(const std::function<Outcome()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        std::printf("    error: %s\n", e.what());
        return {false, "threw"};
    }
}

double simpson_of(const std::function<double(double)>& f, int n) {
    const double h = 1.0 / n;
    double s = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0;
}

std::vector<double> geometric(double lo, double hi, int n) {
    cli::RunConfig cfg;
    cfg.sweep = cli::LambdaSweep{lo, hi, n};
    return cli::lambda_values(cfg);
}

Outcome special_integrals() {
    Outcome o;
    double worst_beta = 0.0;
    double worst_exact = 0.0;
    for (double p : {1.5, 2.0, 2.5, 3.0, 4.0, 5.0}) {
        for (double q : {0.0, 1.0, 2.0, p}) {
            const double dev = std::abs(eval_L(p, q).value - beta_oracle((q + 1) / (p + 1), 0.5) / (p + 1));
            worst_beta = std::max(worst_beta, dev);
            note(o, dev <= 1e-10, "L(" + sci(p) + "," + sci(q) + ") off by " + sci(dev));
        }
        for (double m : {1.0, 2.0, 3.0}) {
            const double dev = std::abs(eval_M(p, m).value - beta_oracle(1 / (p + 1), (m + 1) / 2) / (p + 1));
            worst_beta = std::max(worst_beta, dev);
            note(o, dev <= 1e-10, "M(" + sci(p) + "," + sci(m) + ") off by " + sci(dev));
        }
        const double dl = std::abs(eval_L(p, p).value - 2 / (p + 1));
        const double dm = std::abs(eval_M(p, 1).value - 1);
        worst_exact = std::max({worst_exact, dl, dm});
        note(o, dl <= 1e-12 && dm <= 1e-12, "exact identities at p = " + sci(p));
    }
    o.detail = "max |quadrature - Beta| " + sci(worst_beta) + " (tol 1e-10), max exact-identity error " +
               sci(worst_exact) + " (tol 1e-12)";
    return o;
}

Outcome profile_fidelity() {
    Outcome o;
    double worst_sym = 0.0;
    double worst_norm = 0.0;
    double min_ratio = 1e300;
    for (double p : {2.0, 3.0, 5.0}) {
        const auto w = build_profile(p);
        for (int i = 0; i <= 1000; ++i) {
            const double x = i / 1000.0;
            worst_sym = std::max(worst_sym, std::abs(w.evaluate(x) - w.evaluate(1 - x)));
        }
        auto residual = [&](double h) {
            double worst = 0.0;
            for (double x : {0.1, 0.2, 0.3, 0.4, 0.45, 0.55, 0.7, 0.85}) {
                const double d2 = (w.evaluate(x + h) - 2 * w.evaluate(x) + w.evaluate(x - h)) / (h * h);
                worst = std::max(worst, std::abs(d2 + std::pow(w.evaluate(x), p)));
            }
            return worst;
        };
        const double r1 = residual(0.02);
        const double r2 = residual(0.01);
        const double r3 = residual(0.005);
        min_ratio = std::min({min_ratio, r1 / r2, r2 / r3});
        const double l2 = simpson_of([&](double x) { return std::pow(w.evaluate(x), 2); }, 4000);
        worst_norm = std::max(worst_norm, std::abs(l2 - w.l2_norm_sq()));
    }
    note(o, worst_sym <= 1e-10, "symmetry " + sci(worst_sym));
    note(o, min_ratio >= 3.8, "residual reduction " + sci(min_ratio));
    note(o, worst_norm <= 1e-8, "L2 norm " + sci(worst_norm));
    o.detail = "symmetry " + sci(worst_sym) + " (tol 1e-10), min residual reduction " + sci(min_ratio) +
               "x (need 3.8), |int W^2 - closed form| " + sci(worst_norm) + " (tol 1e-8)";
    return o;
}

Outcome regime_counts() {
    Outcome o;
    const auto p5 = make_scalar_problem(5, 1);
    for (double lambda : geometric(1e-6, 1e6, 50)) {
        note(o, solve_branch(p5, lambda).roots.size() == 1, "p=5 count at lambda " + sci(lambda));
    }

    const auto p3 = make_scalar_problem(3, 1);
    const double thr = p3.d * p3.wp_l2 * p3.wp_l2;
    int transitions3 = 0;
    std::size_t prev = 1;
    for (double lambda : geometric(1e-3, 20, 50)) {
        const std::size_t n = solve_branch(p3, lambda).roots.size();
        note(o, n == (lambda < thr ? 1u : 0u), "p=3 count at lambda " + sci(lambda));
        transitions3 += n != prev;
        prev = n;
    }
    note(o, solve_branch(p3, thr).roots.empty(), "p=3 at the threshold");
    note(o, solve_branch(p3, thr * (1 - 1e-9)).roots.size() == 1, "p=3 just below the threshold");

    const auto p2 = make_scalar_problem(2, 1);
    const double nu = fold(p2).nu;
    for (double lambda : geometric(1e-3, 20, 50)) {
        const auto br = solve_branch(p2, lambda);
        const std::size_t expected = std::abs(lambda - nu) <= 1e-8 * nu ? 1u : (lambda < nu ? 2u : 0u);
        note(o, br.roots.size() == expected, "p=2 count at lambda " + sci(lambda));
    }
    const auto at_fold = solve_branch(p2, nu);
    note(o, at_fold.fold_degenerate && at_fold.roots.size() == 1, "p=2 fold-degenerate at nu");
    o.detail = "threshold d||W_3||^2 = " + sci(thr) + ", nu(p=2,d=1) = " + sci(nu) +
               ", p=3 transitions " + std::to_string(transitions3);
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    struct Triple {
        double p, d, lambda;  // lambda <= 0 means a fraction -lambda of the threshold
    };
    const std::vector<Triple> triples{
        {5, 1, 1},     {5, 1, 0.01},  {4, 2, 10},    {7, 0.5, 1},    {3.5, 1, 100},
        {3, 1, 1},     {3, 1, -0.8},  {3, 2, 0.5},   {2, 1, -0.5},   {1.5, 1, -0.3},
        {2.5, 0.5, -0.9}, {2, 3, -0.05}};
    double worst = 0.0;
    int solved = 0;
    int two_root_cases = 0;
    for (const auto& tr : triples) {
        const auto pr = make_scalar_problem(tr.p, tr.d);
        const auto prof = build_profile(tr.p);
        double lambda = tr.lambda;
        if (lambda <= 0) {
            const double thr = pr.regime() == Regime::Critical ? pr.d * pr.wp_l2 * pr.wp_l2 : fold(pr).nu;
            lambda = -tr.lambda * thr;
        }
        const auto br = solve_branch(pr, lambda);
        note(o, !br.roots.empty(), "no closed-form root at p=" + sci(tr.p));
        std::vector<double> starts;
        if (br.fold) {
            starts = {br.fold->t2 / 10, 10 * br.fold->t2};
            ++two_root_cases;
        } else {
            starts = {1.0};
        }
        std::vector<double> found;
        for (double t0 : starts) {
            const auto sol = solve_nonlocal(pr, lambda, t0);
            found.push_back(sol.l2_sq);
            // closed form for the root on the same side
            double t = br.roots.front();
            for (double r : br.roots) {
                if (std::abs(std::log(r / sol.l2_sq)) < std::abs(std::log(t / sol.l2_sq))) t = r;
            }
            const double closed = amplitude(pr, t) * prof.sup_norm();
            const double dev = std::abs(sol.sup_norm / closed - 1);
            worst = std::max(worst, dev);
            note(o, dev <= 1e-6, "sup-norm deviation " + sci(dev) + " at p=" + sci(tr.p));
            ++solved;
        }
        if (br.roots.size() == 2) {
            note(o, found.size() == 2 && std::abs(found[0] / br.roots[0] - 1) <= 1e-6 &&
                        std::abs(found[1] / br.roots[1] - 1) <= 1e-6,
                 "multistart did not recover both roots at p=" + sci(tr.p));
        }
    }
    note(o, triples.size() >= 10, "fewer than 10 triples");
    o.detail = std::to_string(triples.size()) + " triples, " + std::to_string(solved) +
               " oracle solves (" + std::to_string(two_root_cases) +
               " two-solution cases by multistart), max sup-norm rel. error " + sci(worst) + " (tol 1e-6)";
    return o;
}

Outcome norm_ratio() {
    Outcome o;
    struct Case {
        double a, b, p, lambda;
    };
    double worst_ratio = 0.0;
    double worst_314 = 0.0;
    double worst_t = 0.0;
    int n = 0;
    for (const Case c : {Case{1, 1, 5, 2}, Case{0.5, 2, 3, 30}, Case{0.2, 0.1, 2, 3},
                         Case{0.05, 1, 1.5, 0.5}, Case{2, 0.5, 4, 1}, Case{0, 1, 3, 2}}) {
        const FullProblemParams full{c.a, c.b, c.p};
        const auto pr = reduce(full);
        const double ratio = gradient_ratio(c.p);
        const auto br = solve_branch(pr, c.lambda);
        note(o, !br.roots.empty(), "no branch point for the reduced problem");
        for (double t : br.roots) {
            double t0 = t;
            if (br.fold) t0 = t < br.fold->t2 ? br.fold->t2 / 10 : 10 * br.fold->t2;
            const auto sol = solve_nonlocal(full, c.lambda, t0);
            const double r = std::abs(sol.grad_l2_sq / sol.l2_sq / ratio - 1);
            const double lhs = pr.d * sol.l2_sq + 1;
            const double rhs = c.a * sol.grad_l2_sq + c.b * sol.l2_sq + 1;
            const double e314 = std::abs(lhs / rhs - 1);
            const double et = std::abs(sol.l2_sq / t - 1);
            worst_ratio = std::max(worst_ratio, r);
            worst_314 = std::max(worst_314, e314);
            worst_t = std::max(worst_t, et);
            note(o, r <= 1e-6, "norm ratio " + sci(r));
            note(o, e314 <= 1e-8, "d0 identity " + sci(e314));
            note(o, et <= 1e-6, "reduced root mismatch " + sci(et));
            ++n;
        }
    }
    o.detail = std::to_string(n) + " full-problem solutions: max ratio error " + sci(worst_ratio) +
               " (tol 1e-6), max d0-identity residual " + sci(worst_314) +
               " (tol 1e-8), max |t/t_reduced - 1| " + sci(worst_t);
    return o;
}

Outcome asymptotic_validation() {
    Outcome o;
    struct Sequence {
        const char* name;
        double p;
        ExpansionTag tag;
        std::vector<double> lambdas;
    };
    const auto p3 = make_scalar_problem(3, 1);
    const double W2 = p3.wp_l2 * p3.wp_l2;
    const std::vector<Sequence> seqs{
        {"p=5 large lambda", 5, ExpansionTag::P_gt3_large_lambda, {1e3, 1e4, 1e5, 1e6, 1e7, 1e8}},
        {"p=5 small lambda", 5, ExpansionTag::P_gt3_small_lambda, {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}},
        {"p=2 lower branch", 2, ExpansionTag::P_lt3_lower_small_lambda, {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}},
        {"p=2 upper branch", 2, ExpansionTag::P_lt3_upper_small_lambda, {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}},
        {"p=3 small lambda", 3, ExpansionTag::P_eq3_small_lambda, {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}},
        {"p=3 near threshold", 3, ExpansionTag::P_eq3_near_fold,
         {(1 - 1e-2) * W2, (1 - 1e-3) * W2, (1 - 1e-4) * W2}},
    };
    int ok_count = 0;
    for (const auto& s : seqs) {
        const auto pr = make_scalar_problem(s.p, 1);
        std::vector<double> rel;
        double last_ratio = 0.0;
        for (double lambda : s.lambdas) {
            const auto c = compare_with_exact(pr, lambda, s.tag);
            rel.push_back(c.rel_error);
            last_ratio = c.error_ratio;
        }
        const std::size_t n = rel.size();
        const bool monotone = rel[n - 3] >= rel[n - 2] && rel[n - 2] >= rel[n - 1];
        const bool ratio_ok = std::abs(last_ratio - 1) <= 0.25;
        std::printf("    %-20s |exact/with_corr - 1| last three %s %s %s, error_ratio %.4f  %s\n", s.name,
                    sci(rel[n - 3]).c_str(), sci(rel[n - 2]).c_str(), sci(rel[n - 1]).c_str(), last_ratio,
                    monotone && ratio_ok ? "ok" : (monotone ? "ratio outside 25%" : "not monotone"));
        note(o, monotone, std::string(s.name) + ": not monotone");
        note(o, ratio_ok, std::string(s.name) + ": error_ratio " + sci(last_ratio) + " outside 1 +- 0.25");
        ok_count += monotone && ratio_ok;
    }
    o.detail = std::to_string(ok_count) + "/" + std::to_string(seqs.size()) +
               " sequences monotone with error_ratio within 25% of 1";
    return o;
}

std::string run_cli(const std::string& args, int* status) {
    const std::string cmd = std::string(KIRCHHOFF_CLI_PATH) + " " + args;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("cannot start " + cmd);
    std::string out;
    char buf[4096];
    std::size_t k;
    while ((k = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, k);
    const int raw = pclose(pipe);
    *status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return out;
}

Outcome determinism() {
    Outcome o;
    const std::vector<std::string> commands{
        "branch --p 2 --d 1 --lambda-sweep 0.001 20 50 --format json",
        "branch --p 3 --d 1 --lambda-sweep 1e-6 20 50",
        "fold --p 2 --a 1 --b 1 --format json",
        "profile --p 3 --grid-n 65 --format json",
        "integrals --p 2.5 --q 1 --m 3",
        "asymptotics --p 5 --d 1 --lambda-sweep 1e3 1e8 6 --format json",
    };
    int identical = 0;
    for (const auto& cmd : commands) {
        int s1 = 0;
        int s2 = 0;
        const std::string a = run_cli(cmd, &s1);
        const std::string b = run_cli(cmd, &s2);
        const bool same = s1 == 0 && s2 == 0 && !a.empty() && a == b;
        note(o, same, "not byte-identical: " + cmd);
        identical += same;
    }

    // JSON round trip: every number parses back to the in-process double
    int status = 0;
    const std::string text = run_cli("branch --p 2 --d 1 --lambda-sweep 0.001 20 50 --format json", &status);
    const cli::Json doc = cli::Json::parse(text);
    const auto pr = make_scalar_problem(2, 1);
    std::size_t k = 0;
    std::size_t mismatches = 0;
    for (double lambda : geometric(0.001, 20, 50)) {
        const auto br = solve_branch(pr, lambda);
        for (std::size_t i = 0; i < br.roots.size(); ++i, ++k) {
            const auto& rec = doc["records"].at(k);
            const double amp = amplitude(pr, br.roots[i]);
            mismatches += rec["lambda"].get<double>() != lambda;
            mismatches += rec["t"].get<double>() != br.roots[i];
            mismatches += rec["amplitude"].get<double>() != amp;
            mismatches += rec["sup_norm"].get<double>() != amp * build_profile(2).sup_norm();
            mismatches += rec["l2_norm"].get<double>() != std::sqrt(br.roots[i]);
        }
    }
    mismatches += k != doc["records"].size();
    note(o, mismatches == 0, std::to_string(mismatches) + " JSON fields did not round-trip");
    note(o, doc.dump(2) + "\n" == text, "re-serialised JSON differs");
    o.detail = std::to_string(identical) + "/" + std::to_string(commands.size()) +
               " commands byte-identical over two runs, " + std::to_string(k) +
               " branch records round-tripped with " + std::to_string(mismatches) + " mismatches";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*fn)();
    };
    const Criterion criteria[] = {
        {1, "special-integral oracle equivalence", special_integrals},
        {2, "profile fidelity", profile_fidelity},
        {3, "regime root counts", regime_counts},
        {4, "shooting oracle vs closed-form branch", oracle_equivalence},
        {5, "norm-ratio identity and d0 reduction", norm_ratio},
        {6, "asymptotic expansions", asymptotic_validation},
        {7, "CLI determinism and JSON round trip", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const Outcome r = guarded(c.fn);
        std::printf("criterion %d %s: %s | %s\n", c.id, r.pass ? "PASS" : "FAIL", c.name, r.detail.c_str());
        std::fflush(stdout);
        failed += !r.pass;
    }
    std::printf("%d/7 criteria passed\n", 7 - failed);
    return failed == 0 ? 0 : 1;
}
