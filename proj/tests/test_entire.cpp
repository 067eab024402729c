#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "typelab/entire.hpp"
#include "typelab/errors.hpp"
#include "typelab/numeric.hpp"

using namespace typelab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("product anchors against closed forms") {
    const auto sinc = CanonicalProduct::sinc_pi(100000);

    SUBCASE("sin(pi z)/(pi z) at z = 1/2") {
        const auto v = sinc.eval(0.5, sinc.zero_count());
        CHECK(v.tail_log_bound < 1e-5);
        CHECK(std::abs(v.value().real() - 2.0 / kPi) <= v.tail_log_bound + 1e-9);
    }
    SUBCASE("normalization at the origin is exact") {
        const auto v = sinc.eval(0.0, sinc.zero_count());
        CHECK(v.value().real() == 1.0);
    }
    SUBCASE("cos(pi z) at z = 1") {
        const auto cosp = CanonicalProduct::cos_pi(100000);
        const auto v = cosp.eval(1.0, cosp.zero_count());
        CHECK(std::abs(v.value().real() - (-1.0)) <= v.tail_log_bound + 1e-9);
    }
    SUBCASE("evaluation at a stored zero is flagged") {
        const auto v = sinc.eval(3.0, sinc.zero_count());
        CHECK(v.at_zero);
        CHECK(v.zero_position == 3.0);
    }
    SUBCASE("even symmetry is exact") {
        for (double z : {0.37, 2.25, 17.6}) {
            const auto a = sinc.eval(z, sinc.zero_count());
            const auto b = sinc.eval(-z, sinc.zero_count());
            CHECK(a.log_abs == b.log_abs);
            CHECK(a.phase == b.phase);
        }
    }
}

TEST_CASE("tail bar shrinks monotonically in the truncation") {
    const auto sinc = CanonicalProduct::sinc_pi(10000);
    double prev = 1e9;
    for (size_t N : {1000u, 2000u, 4000u, 8000u, 10000u}) {
        const auto v = sinc.eval(0.5, N);
        CHECK(v.tail_log_bound < prev);
        prev = v.tail_log_bound;
    }
}

TEST_CASE("derivatives at zeros") {
    SUBCASE("single pair: F = 1 - z^2") {
        const CanonicalProduct F({1.0}, false, 1.0, 0.0);
        CHECK(F.derivative_at(1.0) == doctest::Approx(-2.0).epsilon(1e-14));
        CHECK(F.derivative_at(-1.0) == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("sinc derivative at 1") {
        const auto sinc = CanonicalProduct::sinc_pi(100000);
        CHECK(sinc.derivative_at(1.0) == doctest::Approx(-1.0).epsilon(1e-9));
    }
    SUBCASE("cos derivative at 1/2") {
        const auto cosp = CanonicalProduct::cos_pi(100000);
        CHECK(cosp.derivative_at(0.5) == doctest::Approx(-kPi).epsilon(1e-9));
    }
    SUBCASE("sin: origin and lattice derivatives, odd-product parity") {
        const auto sinp = CanonicalProduct::sin_pi(50000);
        CHECK(sinp.derivative_at(0.0) == doctest::Approx(kPi).epsilon(1e-12));
        CHECK(sinp.derivative_at(1.0) == doctest::Approx(-kPi).epsilon(1e-8));
        CHECK(sinp.derivative_at(2.0) == doctest::Approx(kPi).epsilon(1e-8));
        CHECK(sinp.derivative_at(-1.0) == sinp.derivative_at(1.0));
    }
}

TEST_CASE("summability gate rejects dense zero sets") {
    std::vector<double> zeros;
    for (int k = 1; k <= 5000; ++k) zeros.push_back(std::sqrt(static_cast<double>(k)));
    CHECK_THROWS_AS(CanonicalProduct(std::move(zeros), false, 1.0, 0.0), validation_error);
}

TEST_CASE("krein sums over built-in products") {
    SUBCASE("constant weight grows with the zero count") {
        const auto sinp = CanonicalProduct::sin_pi(2000);
        const auto rep = krein_sum(sinp, Weight::constant(1.0));
        CHECK(rep.trend == Trend::growing);
        CHECK(rep.certificate.verdict == "growing");
    }
    SUBCASE("quadratically decaying weight converges to the brute-force sum") {
        const auto sinp = CanonicalProduct::sin_pi(2000);
        const auto rep = krein_sum(sinp, Weight::power(-2.0));
        CHECK(rep.trend == Trend::converged);
        double brute = 1.0 / kPi;  // origin zero: W(0)/|F'(0)|
        for (int n = 1; n <= 2000; ++n) brute += 2.0 * std::pow(1.0 + n, -2.0) / kPi;
        CHECK(rep.partials.back() == doctest::Approx(brute).epsilon(1e-6));
        REQUIRE(rep.abs_convergence_N.has_value());
        CHECK(*rep.abs_convergence_N <= 1);
    }
    SUBCASE("empty zero set sums to zero") {
        const CanonicalProduct empty({}, false, 1.0, 0.0);
        const auto rep = krein_sum(empty, Weight::constant(1.0));
        CHECK(rep.certificate.verdict == "finite");
        CHECK(rep.certificate.value == 0.0);
    }
}

TEST_CASE("annihilation residuals for cos(pi z)") {
    const auto cosp = CanonicalProduct::cos_pi(100000);

    SUBCASE("even type-2 member: the paired sum vanishes identically") {
        const auto rep = annihilation_residual(cosp, sinc_sq(1.0), cosp.zero_count());
        CHECK(rep.residual == 0.0);
        CHECK(rep.tail_bound == 0.0);
        CHECK(rep.annihilated);
    }
    SUBCASE("asymmetric type-4 member is refuted") {
        const auto rep = annihilation_residual(cosp, sinc_sq(2.0, 1.0 / 3.0), cosp.zero_count());
        CHECK(rep.residual > 1e-2);
        CHECK_FALSE(rep.annihilated);
    }
    SUBCASE("asymmetric type-2 member: residual plus tail small at a larger budget") {
        const auto rep =
            annihilation_residual(cosp, sinc_sq(1.0, 1.0 / 3.0), cosp.zero_count(), 1e-2, 4000);
        CHECK(rep.residual + rep.tail_bound <= 1e-2);
        CHECK(rep.annihilated);
    }
    SUBCASE("zero test function gives a zero residual") {
        TestFunction zero;
        zero.f = [](double) { return 0.0; };
        zero.envelope_A = 0;
        zero.envelope_p = 2;
        zero.odd_envelope_A = 0;
        zero.name = "zero";
        const auto rep = annihilation_residual(cosp, zero, cosp.zero_count());
        CHECK(rep.residual == 0.0);
    }
    SUBCASE("linearity of the signed sums") {
        const auto f = sinc_sq(2.0, 1.0 / 3.0);
        const auto g = sinc_sq(1.5, 0.25);
        const double alpha = 0.7, beta = -1.3;
        TestFunction combo;
        combo.f = [=](double x) { return alpha * f.f(x) + beta * g.f(x); };
        combo.envelope_A = std::abs(alpha) * f.envelope_A + std::abs(beta) * g.envelope_A;
        combo.envelope_p = 2;
        combo.odd_envelope_A = std::abs(alpha) * f.odd_envelope_A + std::abs(beta) * g.odd_envelope_A;
        combo.name = "combo";
        const auto sum_f = annihilation_residual(cosp, f, 4000, 1e-6, 4000).signed_sum;
        const auto sum_g = annihilation_residual(cosp, g, 4000, 1e-6, 4000).signed_sum;
        const auto sum_c = annihilation_residual(cosp, combo, 4000, 1e-6, 4000).signed_sum;
        CHECK(sum_c == doctest::Approx(alpha * sum_f + beta * sum_g).epsilon(1e-12));
    }
    SUBCASE("products vanishing at the origin are rejected") {
        const auto sinp = CanonicalProduct::sin_pi(100);
        CHECK_THROWS_AS(annihilation_residual(sinp, sinc_sq(1.0), 100), validation_error);
    }
}

TEST_CASE("counting profiles") {
    SUBCASE("empty set") {
        const auto prof = counting(std::vector<double>{});
        CHECK(prof.n_at(5.0) == 0);
        CHECK(prof.N_at(10.0) == 0.0);
    }
    SUBCASE("integers in [-100, 100]") {
        std::vector<double> pts;
        for (int n = -100; n <= 100; ++n) pts.push_back(n);
        const auto prof = counting(pts);
        CHECK(prof.n_at(2.5) == 5);
        CHECK(prof.n_at(100.0) == 201);

        // brute-force piecewise-quadrature oracle for N(10)
        double oracle = 0;
        for (int j = 1; j < 10; ++j)
            oracle += prof.n_at(j + 0.5) * integrate_simpson([](double t) { return 1.0 / t; },
                                                             j, j + 1.0, 2000);
        CHECK(prof.N_at(10.0) == doctest::Approx(oracle).epsilon(1e-12));
    }
    SUBCASE("additivity over disjoint unions") {
        std::vector<double> a = {1.0, 3.0, 5.0}, b = {2.0, 4.0};
        std::vector<double> both = {1.0, 2.0, 3.0, 4.0, 5.0};
        const auto pa = counting(a), pb = counting(b), pc = counting(both);
        for (double t : {0.5, 1.5, 3.3, 6.0})
            CHECK(pc.n_at(t) == pa.n_at(t) + pb.n_at(t));
    }
}

TEST_CASE("zero-set exclusion certificates") {
    const auto lattice_of = [](auto&& X, double c, double R) {
        std::vector<double> pts;
        int K = 0;
        while (X(c * K) < R * 1.05) ++K;
        for (int k = -K; k <= K; ++k) pts.push_back(X(c * k));
        return pts;
    };

    SUBCASE("arcsinh distortion passes for all listed A") {
        const auto X = [](double t) { return t + 0.5 * std::asinh(t); };
        const auto pts = lattice_of(X, 1.0, 1e4);
        const std::vector<double> A = {1.0, 10.0, 100.0};
        const auto rep = krein_exclusion(pts, 1.0, A, 1e4);
        CHECK(rep.certificate.verdict == "holds");
        CHECK(rep.n_drift_ok);
        for (const auto& e : rep.a_entries) CHECK(e.ok);
        CHECK(rep.nlog_fit.c2 < -0.3);  // leading log^2 coefficient near -1/2
    }
    SUBCASE("the integer lattice fails") {
        const auto X = [](double t) { return t; };
        const auto pts = lattice_of(X, 1.0, 2e3);
        const std::vector<double> A = {1.0};
        const auto rep = krein_exclusion(pts, 1.0, A, 2e3);
        CHECK(rep.certificate.verdict == "fails");
    }
    SUBCASE("the doubled lattice passes") {
        const auto X = [](double t) { return t; };
        const auto pts = lattice_of(X, 2.0, 2e3);
        const std::vector<double> A = {1.0, 10.0};
        const auto rep = krein_exclusion(pts, 1.0, A, 2e3);
        CHECK(rep.certificate.verdict == "holds");
    }
}

TEST_CASE("zero shifts") {
    SUBCASE("identity shift reproduces the product") {
        const auto cosp = CanonicalProduct::cos_pi(500);
        std::map<double, double> targets;
        for (double z : cosp.positive_zeros()) targets[z] = z;
        const auto rep = shift_zeros(cosp, targets, 0.0, 1.0);
        for (double z : {0.3, 1.7, 5.2}) {
            const auto a = cosp.eval(z, cosp.zero_count());
            const auto b = rep.shifted.eval(z, rep.shifted.zero_count());
            CHECK(a.value().real() == doctest::Approx(b.value().real()).epsilon(1e-12));
        }
        CHECK(rep.max_ratio_deviation == 0.0);
    }
    SUBCASE("exponentially small shifts obey the disc-boundary ratio bound") {
        const auto sinp = CanonicalProduct::sin_pi(60);
        std::map<double, double> targets;
        for (double z : sinp.positive_zeros()) targets[z] = z + std::exp(-2.0 * z);
        const auto rep = shift_zeros(sinp, targets, 1.0, 1.0);
        CHECK(rep.decay_fit.points >= 2);
        CHECK(rep.decay_fit.slope <= -4.0 / 3.0);
        CHECK(rep.max_deviation_coeff < 10.0);
    }
    SUBCASE("a target outside its interval names the offender") {
        const auto sinp = CanonicalProduct::sin_pi(20);
        std::map<double, double> targets;
        for (double z : sinp.positive_zeros()) targets[z] = z;
        targets[7.0] = 8.0;  // interval half-length is 3e * e^{-7}
        CHECK_THROWS_WITH_AS(shift_zeros(sinp, targets, 0.0, 1.0),
                             doctest::Contains("7.0"), validation_error);
    }
}

TEST_CASE("real-axis growth and gap bounds") {
    SUBCASE("sin-type product satisfies the growth bound beyond a modest radius") {
        const auto sinp = CanonicalProduct::sin_pi(300);
        std::vector<double> grid;
        for (double x = 0.11; x <= 30; x += 0.37) {
            grid.push_back(x);
            grid.push_back(-x);
        }
        const auto rep = lf_bounds_check(sinp, 1.0, grid);
        REQUIRE(rep.threshold_C.has_value());
        CHECK(*rep.threshold_C <= 13.5);
        // |sin| + |cos| pi + pi^2 <= 1 + pi + pi^2 < e^{|x|/5} needs |x| >= 13.2
        CHECK(*rep.threshold_C >= 10.0);
    }
    SUBCASE("doubled lattice keeps its gap coefficient near 2") {
        std::vector<double> zeros;
        for (int k = 1; k <= 200; ++k) zeros.push_back(2.0 * k);
        const CanonicalProduct B(std::move(zeros), true, 1.0, kPi / 2.0);
        std::vector<double> grid = {0.1};
        const auto rep = lf_bounds_check(B, 0.01, grid);
        CHECK(rep.min_gap_coeff == doctest::Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("four-node systems") {
    SUBCASE("eta = 1/10 quadruple at k = 0 with the exact sum identity") {
        const auto res = build_four_node_system([](int) { return 0.1; }, 0);
        const auto& q = res.nodes.quads[0];
        CHECK(q.a == doctest::Approx(1.2625).epsilon(1e-12));
        CHECK(q.b == doctest::Approx(1.3625).epsilon(1e-12));
        CHECK(q.c == doctest::Approx(1.6375).epsilon(1e-12));
        CHECK(q.d == doctest::Approx(1.7375).epsilon(1e-12));
        CHECK((q.a + q.b) + (q.c + q.d) == 6.0);  // bitwise
        CHECK(q.b - q.a == q.d - q.c);            // bitwise
    }
    SUBCASE("constraints hold exactly for all k up to 200") {
        const auto res = build_four_node_system([](int) { return 0.1; }, 200);
        CHECK_NOTHROW(res.nodes.validate());
        CHECK(res.G.zero_count() == 4 * 201);
    }
    SUBCASE("derivative floor ratio is positive and stable across truncations") {
        const auto r100 = build_four_node_system([](int) { return 0.1; }, 100);
        const auto r200 = build_four_node_system([](int) { return 0.1; }, 200);
        CHECK(r100.min_derivative_ratio > 0.0);
        CHECK(r200.min_derivative_ratio > 0.0);
        const double rel = std::abs(r100.min_derivative_ratio - r200.min_derivative_ratio) /
                           r200.min_derivative_ratio;
        CHECK(rel <= 0.10);
    }
    SUBCASE("eta above 1/10 is rejected") {
        CHECK_THROWS_AS(build_four_node_system([](int) { return 0.11; }, 3), validation_error);
    }
}
