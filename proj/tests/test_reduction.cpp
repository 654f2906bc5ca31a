#include "kirchhoff/reduction.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>

using namespace kirchhoff;
using kirchhoff::testing::rel_err;

TEST_CASE("gradient ratio reference values", "[reduction]") {
    // 40-digit values of 4 L(p,0)^2 M(p,2) / L(p,2)
    CHECK(rel_err(gradient_ratio(2), 9.924662838079021959) <= 1e-12);
    CHECK(rel_err(gradient_ratio(3), 10.03061933746602250) <= 1e-12);
    CHECK(rel_err(gradient_ratio(5), 10.25953762490965308) <= 1e-12);
}

TEST_CASE("gradient ratio equals the profile norm ratio", "[reduction][property]") {
    for (double p : {1.3, 2.0, 2.5, 3.0, 4.0, 7.0}) {
        const auto w = build_profile(p);
        CAPTURE(p);
        CHECK(rel_err(gradient_ratio(p), w.grad_l2_norm_sq() / w.l2_norm_sq()) <= 1e-12);
        // Wirtinger: ||u'||^2 >= pi^2 ||u||^2 on (0,1) with zero boundary values
        CHECK(gradient_ratio(p) > M_PI * M_PI);
    }
}

TEST_CASE("reduced coefficient", "[reduction]") {
    CHECK(reduced_coefficient({0.0, 2.5, 3.0}) == 2.5);
    const double r = gradient_ratio(2);
    CHECK(rel_err(reduced_coefficient({1.0, 1.0, 2.0}), r + 1.0) <= 1e-15);
    CHECK(rel_err(reduced_coefficient({0.3, 0.7, 2.0}), 0.3 * r + 0.7) <= 1e-15);

    const auto pr = reduce({2.0, 0.5, 5.0});
    CHECK(pr.p == 5.0);
    CHECK(rel_err(pr.d, 2.0 * gradient_ratio(5) + 0.5) <= 1e-15);
    CHECK(rel_err(pr.wp_l2, build_profile(5).l2_norm()) <= 1e-15);
}

TEST_CASE("full-problem identity on reconstructed solutions", "[reduction][property]") {
    // a ||u'||^2 + b ||u||^2 = d0 ||u||^2 for u = c W_p, any c
    for (double p : {2.0, 3.0, 5.0}) {
        const FullProblemParams full{0.8, 1.3, p};
        const auto pr = reduce(full);
        const auto w = build_profile(p);
        for (double c : {1e-3, 0.5, 1.0, 40.0}) {
            const double lhs = full.a * c * c * w.grad_l2_norm_sq() + full.b * c * c * w.l2_norm_sq();
            CHECK(rel_err(lhs, pr.d * c * c * w.l2_norm_sq()) <= 1e-13);
        }
    }
}

TEST_CASE("invalid full parameters", "[reduction]") {
    CHECK_THROWS_AS(reduced_coefficient({-1.0, 1.0, 3.0}), DomainError);
    CHECK_THROWS_AS(reduced_coefficient({1.0, 0.0, 3.0}), DomainError);
    CHECK_THROWS_AS(reduced_coefficient({1.0, 1.0, 1.0}), DomainError);
}
