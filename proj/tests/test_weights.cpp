#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "typelab/errors.hpp"
#include "typelab/weights.hpp"

using namespace typelab;

namespace {
std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}
} // namespace

TEST_CASE("seminorm suprema") {
    const auto grid01 = uniform_grid(0.0, 3.0, 10001);
    SUBCASE("zero function") {
        const auto r = c0_seminorm([](double) { return 0.0; }, Weight::constant(1.0), grid01);
        CHECK(r.value == 0.0);
    }
    SUBCASE("sine against the unit weight peaks near pi/2") {
        const auto r = c0_seminorm([](double x) { return std::sin(x); }, Weight::constant(1.0),
                                   grid01);
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::abs(r.argmax - std::numbers::pi / 2) < 2e-3);
    }
    SUBCASE("x over 1+x^2 peaks at one") {
        const Weight W([](double x) { return 1.0 + x * x; });
        const auto grid = uniform_grid(-1000.0, 1000.0, 2000001);
        const auto r = c0_seminorm([](double x) { return x; }, W, grid);
        CHECK(r.value == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(std::abs(std::abs(r.argmax) - 1.0) < 2e-3);
    }
    SUBCASE("vanishing weight is rejected") {
        const Weight W([](double x) { return std::abs(x); });
        const std::vector<double> g = {0.0, 1.0};
        CHECK_THROWS_AS(c0_seminorm([](double) { return 1.0; }, W, g), validation_error);
    }
}

TEST_CASE("power shifts compose exactly") {
    const Weight W([](double x) { return 2.0 + std::cos(x); });
    const Weight a = W.shifted(1.25).shifted(0.5);
    const Weight b = W.shifted(1.75);
    for (double x : {0.0, 0.3, -7.7, 123.4}) CHECK(a(x) == b(x));
}

TEST_CASE("weight growth check") {
    const auto grid = uniform_grid(-500.0, 500.0, 4001);
    const std::vector<double> s_grid = {0.0, 1.0, 2.0, 3.0};
    SUBCASE("decaying weight needs a positive power") {
        const auto rep = check_weight_growth(Weight::power(-1.0), s_grid, grid);
        CHECK(rep.holds);
        REQUIRE(rep.witness_s.has_value());
        CHECK(*rep.witness_s >= 2.0);
    }
    SUBCASE("growing weight passes at s = 0") {
        const auto rep = check_weight_growth(Weight::power(1.0), s_grid, grid);
        CHECK(rep.holds);
        CHECK(*rep.witness_s == 0.0);
    }
}

TEST_CASE("windowed-infimum weight transform") {
    SUBCASE("unit base stays unit") {
        const auto grid = uniform_grid(-10.0, 10.0, 40001);
        const auto res = weight_transform(Weight::constant(1.0), 0.5, 0.0, grid);
        for (size_t i = 0; i < res.values.size(); i += 997)
            CHECK(res.values[i] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("quartic base with p = 2 matches the brute-force window minimum") {
        const double delta = 0.5, p = 2.0;
        const double k1 = 3.0 * std::exp(delta);
        const auto grid = uniform_grid(-12.0, 12.0, 96001);
        const Weight base = Weight::power(4.0);
        const auto res = weight_transform(base, delta, p, grid);
        const auto Wp = [&](double t) { return std::pow(1.0 + std::abs(t), 2.0); };
        for (size_t i = 100; i < grid.size(); i += 1777) {
            const double x = grid[i];
            const double h = k1 * std::exp(-delta * std::abs(x));
            // brute-force: samples strictly inside after the one-sample bias
            std::vector<double> inside;
            for (double t : grid)
                if (t >= x - h && t <= x + h) inside.push_back(t);
            REQUIRE(inside.size() >= 3);
            double inf = std::numeric_limits<double>::infinity();
            for (size_t j = 1; j + 1 < inside.size(); ++j) inf = std::min(inf, Wp(inside[j]));
            const double expected = std::min(inf, std::exp(delta * std::abs(x) / 3.0));
            CHECK(res.values[i] == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    SUBCASE("discrete support: the cap takes over where the window misses it") {
        std::vector<double> support;
        for (int n = -30; n <= 30; ++n) support.push_back(n);
        const Weight base = Weight::discrete(support, [](double) { return 1.0; });
        const double delta = 1.0;
        const auto grid = uniform_grid(-8.0, 8.0, 1 << 18);
        const auto res = weight_transform(base, delta, 0.0, grid);
        const double k1 = 3.0 * std::exp(delta);
        for (size_t i = 0; i < grid.size(); i += 4099) {
            const double x = grid[i];
            const double h = k1 * std::exp(-delta * std::abs(x));
            bool hits = false;
            for (double n : support)
                if (n >= x - h && n <= x + h) hits = true;
            const double cap = std::exp(delta * std::abs(x) / 3.0);
            if (!hits)
                CHECK(res.values[i] == doctest::Approx(cap).epsilon(1e-14));
            else
                CHECK(res.values[i] == doctest::Approx(std::min(1.0, cap)).epsilon(1e-14));
        }
    }
    SUBCASE("reports the squared-norm trend against a supplied measure") {
        const auto grid = uniform_grid(-12.0, 12.0, 48001);
        const auto mu = SpectralMeasure::lattice(1.0, 1.0, 10);
        const auto res = weight_transform(Weight::power(-2.0), 0.5, 2.0, grid, &mu);
        REQUIRE(!res.l2_partials.empty());
        // (1+|x|)^{-4}-type values square-sum to something finite-looking
        CHECK(res.l2_trend == Trend::converged);
    }
    SUBCASE("cap and pointwise bounds hold") {
        const auto grid = uniform_grid(-12.0, 12.0, 48001);
        const double delta = 0.5, p = 1.0;
        const auto res = weight_transform(Weight::power(3.0), delta, p, grid);
        for (size_t i = 0; i < grid.size(); i += 577) {
            const double x = grid[i];
            CHECK(res.values[i] <= std::exp(delta * std::abs(x) / 3.0) * (1 + 1e-15));
            CHECK(res.values[i] <= std::pow(1.0 + std::abs(x), 2.0) * (1 + 1e-15));
        }
    }
}

TEST_CASE("series weight from approximants") {
    const auto f = [](double x) {
        return std::complex<double>(std::exp(-x * x / 50.0), 0.0);
    };
    const auto target = [&](double x) { return f(x) / std::complex<double>(x, -1.0); };
    const auto grid = uniform_grid(-1000.0, 1000.0, 8001);
    const std::vector<double> s_values = {1.0};

    SUBCASE("exact approximants collapse the series") {
        std::vector<BakanApproximant> hs;
        for (int k = 1; k <= 5; ++k) hs.push_back({[&](double x) { return target(x); }, 0.0});
        const auto res = bakan_weight(f, hs, 2, 5, grid, s_values);
        for (double x : {0.0, 1.5, -20.0, 500.0}) {
            const double expected = std::sqrt(1.0 / (1.0 + std::pow(std::abs(x), 2.0)));
            CHECK(res.weight(x) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    SUBCASE("synthetic residuals satisfy the seminorm chain") {
        std::vector<BakanApproximant> hs;
        for (int k = 1; k <= 6; ++k) {
            hs.push_back({[&, k](double x) {
                              return target(x) + std::pow(8.0, -k) *
                                                     std::pow(1.0 + std::abs(x), -k - 1.0);
                          },
                          std::pow(8.0, -k)});
        }
        const auto res = bakan_weight(f, hs, 2, 6, grid, s_values);
        CHECK(!res.chain.empty());
        for (const auto& e : res.chain) {
            CHECK(e.within_bound);
            CHECK(e.seminorm <= std::pow(2.0, -e.k) * (1 + 1e-9));
        }
    }
    SUBCASE("pointwise monotone in the truncation") {
        std::vector<BakanApproximant> hs;
        for (int k = 1; k <= 10; ++k) {
            hs.push_back({[&, k](double x) {
                              return target(x) + std::pow(8.0, -k) *
                                                     std::pow(1.0 + std::abs(x), -k - 1.0);
                          },
                          std::pow(8.0, -k)});
        }
        const auto r5 = bakan_weight(f, hs, 2, 5, grid, s_values);
        const auto r10 = bakan_weight(f, hs, 2, 10, grid, s_values);
        for (double x : {0.0, 2.2, -31.0, 700.0}) CHECK(r5.weight(x) <= r10.weight(x) * (1 + 1e-15));
    }
    SUBCASE("K = 0 with n < 1 is rejected") {
        CHECK_THROWS_AS(bakan_weight(f, {}, 0, 0, grid, s_values), validation_error);
    }
}
