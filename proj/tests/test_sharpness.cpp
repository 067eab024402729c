#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "typelab/errors.hpp"
#include "typelab/numeric.hpp"
#include "typelab/sharpness.hpp"

using namespace typelab;

TEST_CASE("epsilon rates") {
    const auto eps = EpsilonRate::inverse_log();
    CHECK(eps(10.0) == doctest::Approx(1.0 / std::log(std::numbers::e + 10.0)).epsilon(1e-15));
    // log channel agrees with the direct one where both are finite
    for (double u : {0.0, 1.0, 5.0, 40.0, 200.0})
        if (u < 690) {
            const double direct = u < 700 ? eps(std::exp(u)) : 0.0;
            if (u < 690) CHECK(eps.at_log(u) == doctest::Approx(direct).epsilon(1e-12));
        }
    // stays evaluable far beyond double range in r
    CHECK(eps.at_log(1e6) == doctest::Approx(1e-6).epsilon(1e-3));
    std::vector<double> grid = {1.0, 10.0, 100.0, 1000.0};
    CHECK_NOTHROW(eps.check_monotone(grid));
}

TEST_CASE("slowly divergent weight pair construction") {
    const auto eps = EpsilonRate::inverse_log();
    const auto res = build_weight_pair(eps, 8);
    REQUIRE(res.f.steps.size() == 8);

    SUBCASE("first step lands at the first feasible integer") {
        const auto& s = res.f.steps[0];
        CHECK(s.a == 14.0);
        CHECK(s.b == doctest::Approx(20.875).epsilon(1e-15));
        // feasibility of the two step inequalities at the returned pair
        CHECK(s.gamma < 0.25);
        CHECK((s.b - s.a) * s.gamma < 0.5);
        CHECK(std::expm1(s.b - s.a) / (s.b - s.a) * s.gamma >= 10.0);
    }

    SUBCASE("per-step integrals verified by quadrature in the shifted variable") {
        for (const auto& s : res.f.steps) {
            const double d = s.b - s.a;
            const double Q = std::expm1(d) / d;
            const auto integrand = [&](double t) { return (1.0 + Q * t) * std::exp(-t); };
            const double main_quad = s.gamma * integrate_gl(integrand, 0.0, d, 256, 12);
            const double head_quad = s.gamma * integrate_gl(integrand, -1.0 / Q, 0.0, 64, 12);
            const double tail_quad = s.gamma * integrate_gl(integrand, d, d + 80.0, 512, 12);
            CHECK(main_quad == doctest::Approx(s.int_main).epsilon(1e-9));
            CHECK(head_quad == doctest::Approx(s.int_head).epsilon(1e-9));
            CHECK(tail_quad == doctest::Approx(s.int_tail).epsilon(1e-7));
            CHECK(main_quad >= 1.0 - 1e-9);
            CHECK(head_quad <= (std::numbers::e - 1.0) * s.gamma + 1e-9);
            CHECK(tail_quad <= 2.0 * s.gamma + 1e-9);
            CHECK(s.cap_integral < std::pow(2.0, -s.n));
        }
    }

    SUBCASE("divergence ledger and the gamma budget") {
        for (size_t n = 1; n <= res.divergence_partials.size(); ++n)
            CHECK(res.divergence_partials[n - 1] >= static_cast<double>(n) - 1.0 / 3.0);
        CHECK(res.gamma_sum < 1.0 / 3.0);
        // capped increments fall like 2^-n with the gamma side terms
        for (size_t i = 0; i < res.capped_increments.size(); ++i)
            CHECK(res.capped_increments[i] <=
                  std::pow(2.0, -static_cast<double>(i + 1)) +
                      3.72 * res.f.steps[i].gamma + 1e-12);
    }

    SUBCASE("log integrals: phi diverges while psi converges") {
        std::vector<double> u_windows;
        for (const auto& s : res.f.steps) u_windows.push_back(s.b + 1.0);
        const auto phi_rep = log_integral_report_u([&](double u) { return res.log_f_u(u); },
                                                   u_windows);
        CHECK(phi_rep.verdict == DivergenceVerdict::diverging);
        const auto psi_rep = log_integral_report_u(
            [&](double u) { return res.log_neg_log_psi_u(u); }, u_windows);
        CHECK(psi_rep.verdict == DivergenceVerdict::converged);
    }

    SUBCASE("psi dominates phi pointwise") {
        for (double u : {2.0, 14.5, 30.0, 300.0, 70000.0}) {
            const double lf = res.log_f_u(u);
            const double lp = res.log_neg_log_psi_u(u);
            if (lf == -std::numeric_limits<double>::infinity()) continue;
            CHECK(lp <= lf + 1e-12);
        }
    }

    SUBCASE("empty construction") {
        const auto empty = build_weight_pair(eps, 0);
        CHECK(empty.f.steps.empty());
        CHECK(empty.log_f_u(100.0) == -std::numeric_limits<double>::infinity());
    }
}

TEST_CASE("x-space log integral") {
    const auto windows = geometric_windows(4.0, 4.0, 8);
    SUBCASE("unit weight converges at zero") {
        const auto rep = log_integral_report([](double) { return 0.0; }, windows);
        for (double p : rep.partials) CHECK(p == doctest::Approx(0.0));
        CHECK(rep.verdict == DivergenceVerdict::converged);
    }
    SUBCASE("exponential weight diverges logarithmically") {
        const auto rep = log_integral_report([](double x) { return std::abs(x); }, windows);
        CHECK(rep.verdict == DivergenceVerdict::diverging);
        // closed-form growth: partial over [-R, R] is log(1 + R^2)
        for (size_t i = 0; i < windows.size(); ++i)
            CHECK(rep.partials[i] ==
                  doctest::Approx(std::log(1.0 + windows[i] * windows[i])).epsilon(1e-9));
    }
}

TEST_CASE("disjoint interval system") {
    const auto eps = EpsilonRate::inverse_log();
    const auto res = build_interval_system(eps, 6);
    REQUIRE(res.terms.size() == 6);

    SUBCASE("first interval starts at the seed and the profile identity holds") {
        CHECK(res.terms[0].log_y == doctest::Approx(std::log(10.0)).epsilon(1e-15));
        const double gamma1 = 1.0 / std::log(std::numbers::e + 10.0);
        CHECK(res.terms[0].gamma == doctest::Approx(gamma1).epsilon(1e-12));
        for (const auto& t : res.terms)
            CHECK(t.quad_identity ==
                  doctest::Approx(std::numbers::e * t.gamma).epsilon(1e-9));
    }
    SUBCASE("intervals are disjoint by exact ordering") {
        for (size_t i = 1; i < res.log_y.size(); ++i)
            CHECK(res.log_y[i] >= res.log_y[i - 1] + std::log(4.0) - 1e-12);
    }
    SUBCASE("the ratio surrogate holds at the pinned probe and stays O(1/k)") {
        // with eps nonincreasing, the probe ratio obeys 1.5/(1+log 1.5)/k exactly
        const double probe_const = 1.5 / (1.0 + std::log(1.5));
        for (const auto& t : res.terms) {
            CHECK(t.ratio_bound <= probe_const / t.k * (1 + 1e-12));
            CHECK(t.k * t.ratio_sup <= 1.25);
        }
        // the vanishing-ratio trend behind the construction
        for (size_t i = 1; i < res.terms.size(); ++i)
            CHECK(res.terms[i].ratio_sup < res.terms[i - 1].ratio_sup);
    }
    SUBCASE("gamma partials are Cauchy") { CHECK(res.gamma_cauchy); }
}

TEST_CASE("paired node sets") {
    const auto eps = EpsilonRate::inverse_log();
    const auto intervals = build_interval_system(eps, 6);
    const auto res = build_paired_nodes(eps, 40, intervals);

    SUBCASE("index split follows the interval union") {
        CHECK(res.set_B == std::vector<int>{5, 6, 7, 8, 9});
        CHECK(res.set_A.size() + res.set_B.size() == 41);
    }
    SUBCASE("eta values: 1/10 on A, exponentially small on B") {
        for (int k : res.set_A) {
            const auto& q = res.quads.nodes.quads[static_cast<size_t>(k)];
            CHECK(std::abs(q.eta - 0.1) <= 1e-13);
        }
        for (int k : res.set_B) {
            const auto& q = res.quads.nodes.quads[static_cast<size_t>(k)];
            const double eta_rule = std::exp(-eps(2.0 * k + 2.0) * (2.0 * k + 2.0));
            CHECK(q.eta == doctest::Approx(eta_rule).epsilon(1e-10));
        }
    }
    SUBCASE("pairing bound holds exactly per dropped node") {
        CHECK(res.pairing_ok);
        CHECK(res.pairs.size() == 2 * res.set_B.size());
        for (const auto& p : res.pairs) CHECK(std::abs(p.y - p.x) <= p.bound);
    }
    SUBCASE("lambda-star drops exactly the b, d nodes of B") {
        CHECK(res.lambda.size() == 4 * 41 * 2 + 1);
        CHECK(res.lambda_star.size() == res.lambda.size() - 4 * res.set_B.size());
        // every dropped node is a b or d of a B quad
        std::vector<double> dropped;
        std::set_difference(res.lambda.begin(), res.lambda.end(), res.lambda_star.begin(),
                            res.lambda_star.end(), std::back_inserter(dropped));
        CHECK(dropped.size() == 4 * res.set_B.size());
        for (double v : dropped) {
            bool matches = false;
            for (int k : res.set_B) {
                const auto& q = res.quads.nodes.quads[static_cast<size_t>(k)];
                if (std::abs(v) == q.b || std::abs(v) == q.d) matches = true;
            }
            CHECK(matches);
        }
    }
    SUBCASE("annihilation sweep separates the types") {
        for (const auto& e : res.annihilation) {
            if (e.type < 2.0 * std::numbers::pi) {
                CHECK(e.report.annihilated);
            } else {
                CHECK(e.report.residual > 1e-3);
                CHECK_FALSE(e.report.annihilated);
            }
        }
    }
    SUBCASE("a window with no covered integer pair is reported") {
        CHECK_THROWS_AS(build_paired_nodes(eps, 3, intervals), validation_error);
    }
}
