#include "kirchhoff/cli.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>
#include <vector>

namespace {

using kirchhoff::cli::Command;
using kirchhoff::cli::Format;
using kirchhoff::cli::RunConfig;

struct Flags {
    std::optional<double> d, a, b, lambda;
    std::vector<double> sweep;
    std::optional<std::string> expansion;
    std::string format = "csv";
};

void add_common(CLI::App* sub, RunConfig& cfg, Flags& fl) {
    sub->add_option("--p", cfg.p, "exponent p > 1")->required();
    sub->add_option("--format", fl.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol-quad", cfg.tol_quad, "quadrature tolerance");
    sub->add_option("--tol-root", cfg.tol_root, "relative root tolerance on t");
    sub->add_option("--tol-fp", cfg.tol_fp, "fixed-point tolerance for the oracle");
    sub->add_option("--grid-n", cfg.grid_n, "number of profile samples");
}

void add_problem(CLI::App* sub, Flags& fl) {
    sub->add_option("--d", fl.d, "Kirchhoff coefficient d > 0");
    sub->add_option("--a", fl.a, "gradient coefficient a >= 0");
    sub->add_option("--b", fl.b, "L2 coefficient b > 0");
}

void add_lambda(CLI::App* sub, Flags& fl) {
    sub->add_option("--lambda", fl.lambda, "single lambda");
    sub->add_option("--lambda-sweep", fl.sweep, "geometric sweep: MIN MAX COUNT")->expected(3);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solution branches of a one-dimensional Kirchhoff problem with logarithmic coefficient"};
    app.require_subcommand(1);

    RunConfig cfg;
    Flags fl;
    std::map<CLI::App*, Command> commands;

    auto* integrals = app.add_subcommand("integrals", "special integrals L(p,q) and M(p,m)");
    add_common(integrals, cfg, fl);
    integrals->add_option("--q", cfg.q, "index q >= 0 of L");
    integrals->add_option("--m", cfg.m, "index m >= 1 of M");
    commands[integrals] = Command::integrals;

    auto* profile = app.add_subcommand("profile", "samples of the ground profile W_p and W_p'");
    add_common(profile, cfg, fl);
    commands[profile] = Command::profile;

    auto* branch = app.add_subcommand("branch", "all solutions for given lambda values");
    add_common(branch, cfg, fl);
    add_problem(branch, fl);
    add_lambda(branch, fl);
    commands[branch] = Command::branch;

    auto* fold = app.add_subcommand("fold", "turning point (t2, nu) for 1 < p < 3");
    add_common(fold, cfg, fl);
    add_problem(fold, fl);
    commands[fold] = Command::fold;

    auto* asym = app.add_subcommand("asymptotics", "exact branch against its asymptotic expansions");
    add_common(asym, cfg, fl);
    add_problem(asym, fl);
    add_lambda(asym, fl);
    asym->add_option("--expansion", fl.expansion, "force one expansion, e.g. P_gt3_large_lambda");
    commands[asym] = Command::asymptotics;

    auto* verify = app.add_subcommand("verify", "shooting oracle against the closed-form branch");
    add_common(verify, cfg, fl);
    add_problem(verify, fl);
    add_lambda(verify, fl);
    commands[verify] = Command::verify;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    for (const auto& [sub, cmd] : commands) {
        if (sub->parsed()) cfg.command = cmd;
    }
    cfg.d = fl.d;
    cfg.a = fl.a;
    cfg.b = fl.b;
    cfg.lambda = fl.lambda;
    cfg.expansion = fl.expansion;
    cfg.format = fl.format == "json" ? Format::json : Format::csv;
    if (!fl.sweep.empty()) {
        const double count = fl.sweep[2];
        if (count != std::floor(count) || count < 2 || count > 1e6) {
            std::cerr << "--lambda-sweep COUNT must be an integer >= 2\n";
            return 2;
        }
        cfg.sweep = kirchhoff::cli::LambdaSweep{fl.sweep[0], fl.sweep[1], static_cast<int>(count)};
    }

    return kirchhoff::cli::run(cfg, std::cout, std::cerr);
}
