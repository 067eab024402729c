#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "typelab/errors.hpp"
#include "typelab/numeric.hpp"
#include "typelab/sturm_liouville.hpp"

using namespace typelab;

namespace {
constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

std::vector<double> xs_to(double hi, int n) {
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = hi * i / n;
    return g;
}
} // namespace

TEST_CASE("boundary-value solutions against closed forms") {
    const auto grid = xs_to(1.0, 64);
    SUBCASE("free problem, Neumann-free slope") {
        const SLProblem pb{kPi, Potential::zero(), 0.0};
        const auto om = solve_omega(pb, 2.0, grid);
        CHECK(om.back().real() == doctest::Approx(std::cos(2.0)).epsilon(1e-9));
    }
    SUBCASE("free problem with slope one") {
        const SLProblem pb{kPi, Potential::zero(), 1.0};
        const auto om = solve_omega(pb, 2.0, grid);
        CHECK(om.back().real() ==
              doctest::Approx(std::cos(2.0) + std::sin(2.0) / 2.0).epsilon(1e-9));
    }
    SUBCASE("constant potential shifts the frequency") {
        const SLProblem pb{kPi, Potential::constant(1.0), 0.0};
        const auto om = solve_omega(pb, 2.0, grid);
        const double nu = std::sqrt(3.0);
        CHECK(om.back().real() == doctest::Approx(std::cos(nu)).epsilon(1e-9));
    }
    SUBCASE("momentum zero uses the limiting kernels") {
        const SLProblem pb{kPi, Potential::zero(), 1.0};
        const auto om = solve_omega(pb, 0.0, grid);
        CHECK(om.back().real() == doctest::Approx(1.0 + 1.0).epsilon(1e-9));  // 1 + h x
    }
    SUBCASE("even in the momentum") {
        const SLProblem pb{kPi, Potential::constant(0.5), 0.7};
        const auto a = solve_omega(pb, 1.7, grid);
        const auto b = solve_omega(pb, -1.7, grid);
        CHECK(a.back().real() == doctest::Approx(b.back().real()).epsilon(1e-13));
    }
    SUBCASE("matches the even power series on small momenta") {
        const SLProblem pb{kPi, Potential::zero(), 0.0};
        for (double l : {0.25, 0.7, 1.0}) {
            const auto om = solve_omega(pb, l, grid);
            // cos(l x) series in l^2, truncated far below the tolerance
            double series = 0, term = 1;
            const double u = l * 1.0;
            for (int k = 0; k < 12; ++k) {
                series += term;
                term *= -u * u / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            }
            CHECK(om.back().real() == doctest::Approx(series).epsilon(1e-10));
        }
    }
}

TEST_CASE("cosine-comparison envelope") {
    SUBCASE("free problem is exactly cosine") {
        const SLProblem pb{kPi, Potential::zero(), 0.0};
        const auto rep = omega_bound_check(pb, 2.0, 1.0);
        CHECK_FALSE(rep.vacuous);
        CHECK(rep.lhs <= 1e-9);
        CHECK(rep.holds);
    }
    SUBCASE("unit potential at momentum ten") {
        const SLProblem pb{kPi, Potential::constant(1.0), 0.0};
        const auto rep = omega_bound_check(pb, 10.0, 1.0);
        CHECK_FALSE(rep.vacuous);
        CHECK(rep.rhs == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
        CHECK(rep.holds);
    }
    SUBCASE("complex momentum gains the exponential factor") {
        const SLProblem pb{kPi, Potential::constant(1.0), 0.0};
        const auto rep = omega_bound_check(pb, cplx(10.0, 1.0), 1.0);
        CHECK(rep.holds);
        CHECK(rep.rhs > 1.0 / 9.0);  // e^{x |Im|} enlarges the envelope
    }
    SUBCASE("momentum below the potential mass is vacuous") {
        const SLProblem pb{kPi, Potential::constant(5.0), 0.0};
        CHECK(omega_bound_check(pb, 2.0, 1.0).vacuous);
    }
}

TEST_CASE("transform against direct quadrature") {
    const BumpFunction f{0.3, 2.8};
    const auto ff = [&](double x) { return f(x); };
    SUBCASE("free problem gives the cosine transform") {
        const SLProblem pb{kPi, Potential::zero(), 0.0};
        const std::vector<double> lg = {0.0, 1.0, 4.5, 11.0};
        const auto w = weyl_transform(ff, 2.8, pb, lg);
        for (size_t i = 0; i < lg.size(); ++i) {
            const double direct = integrate_gl(
                [&](double x) { return f(x) * std::cos(lg[i] * x); }, 0.3, 2.8, 512, 12);
            CHECK(w[i] == doctest::Approx(direct).epsilon(1e-10));
        }
    }
    SUBCASE("constant potential matches the shifted-frequency closed form") {
        const SLProblem pb{kPi, Potential::constant(1.0), 0.0};
        const std::vector<double> lg = {3.0};
        const auto w = weyl_transform(ff, 2.8, pb, lg);
        const double nu = std::sqrt(9.0 - 1.0);
        const double direct = integrate_gl(
            [&](double x) { return f(x) * std::cos(nu * x); }, 0.3, 2.8, 512, 12);
        CHECK(w[0] == doctest::Approx(direct).epsilon(1e-8));
    }
    SUBCASE("support beyond the interval is refused") {
        const SLProblem pb{2.0, Potential::zero(), 0.0};
        const std::vector<double> lg = {1.0};
        CHECK_THROWS_AS(weyl_transform(ff, 2.8, pb, lg), validation_error);
    }
}

TEST_CASE("transform intertwines the differential action") {
    // W(-u'') = l^2 W(u) for u with u'(0) = h u(0) = 0
    const BumpFunction u{0.3, 2.8};
    const SLProblem pb{kPi, Potential::zero(), 0.0};
    const auto neg_u2 = [&](double x) {
        const double h = 1e-3;
        return -(-u(x + 2 * h) + 16 * u(x + h) - 30 * u(x) + 16 * u(x - h) - u(x - 2 * h)) /
               (12.0 * h * h);
    };
    for (double l : {1.0, 5.0}) {
        const std::vector<double> lg = {l};
        const double lhs = weyl_transform(neg_u2, 2.81, pb, lg)[0];
        const double rhs = l * l * weyl_transform([&](double x) { return u(x); }, 2.81, pb, lg)[0];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
}

TEST_CASE("norm identities") {
    const BumpFunction f{0.3, 2.8};
    const auto ff = [&](double x) { return f(x); };
    SUBCASE("cosine lattice at interval length pi") {
        const SLProblem pb{kPi, Potential::zero(), 0.0};
        const auto mu = SpectralMeasure::lattice(1.0, 1.0 / kPi, 256);
        const auto rep = parseval_check(ff, 2.8, pb, mu);
        CHECK(rep.relative_error <= 1e-8);
        CHECK(rep.tail_bound <= 1e-8);
    }
    SUBCASE("continuum window as a Plancherel surrogate") {
        const SLProblem pb{1e9, Potential::zero(), 0.0};
        const auto mu = SpectralMeasure::lebesgue(1.0 / kPi, 1000.0);
        const auto rep = parseval_check(ff, 2.8, pb, mu);
        CHECK(rep.relative_error <= 1e-6);
    }
    SUBCASE("zero function") {
        const SLProblem pb{kPi, Potential::zero(), 0.0};
        const auto mu = SpectralMeasure::lattice(1.0, 1.0 / kPi, 64);
        const auto rep = parseval_check([](double) { return 0.0; }, 2.8, pb, mu);
        CHECK(rep.relative_error == 0.0);
    }
    SUBCASE("error does not grow past doubling of the truncation radius") {
        const SLProblem pb{kPi, Potential::zero(), 0.0};
        double prev = -1;
        for (int count : {128, 256, 512}) {
            const auto mu = SpectralMeasure::lattice(1.0, 1.0 / kPi, count);
            const auto rep = parseval_check(ff, 2.8, pb, mu);
            if (prev >= 0) CHECK(rep.relative_error <= 2.0 * prev + 1e-12);
            prev = rep.relative_error;
        }
    }
}

TEST_CASE("second-moment transform anchors") {
    std::vector<double> xg;
    for (double x = 0; x <= 3.0; x += 0.05) xg.push_back(x);

    SUBCASE("continuum density gives |x|") {
        const auto mu = SpectralMeasure::lebesgue(1.0 / kPi, 1e4);
        const auto phi = phi_transform(mu, xg, 1.0 / kPi);
        for (size_t i = 0; i < xg.size(); ++i)
            CHECK(phi.values[i] == doctest::Approx(xg[i]).epsilon(1e-6));
    }
    SUBCASE("unit lattice gives |x| below the first echo") {
        const auto mu = SpectralMeasure::lattice(1.0, 1.0 / kPi, 100000);
        const auto phi = phi_transform(mu, xg, 1.0 / kPi);
        for (size_t i = 0; i < xg.size(); i += 7)
            CHECK(phi.values[i] == doctest::Approx(xg[i]).epsilon(1e-6));
    }
    SUBCASE("empty measure gives zero") {
        const auto mu = SpectralMeasure::from_atoms({}, 1.0);
        const auto phi = phi_transform(mu, xg);
        for (double v : phi.values) CHECK(v == 0.0);
    }
    SUBCASE("additive in the measure") {
        const auto mu1 = SpectralMeasure::lattice(1.0, 0.3, 500);
        const auto mu2 = SpectralMeasure::lattice(0.5, 0.2, 1000);
        std::vector<Atom> merged;
        for (const auto& a : mu1.real_atoms()) merged.push_back(a);
        for (const auto& a : mu2.real_atoms()) merged.push_back(a);
        std::sort(merged.begin(), merged.end(),
                  [](const Atom& a, const Atom& b) { return a.position < b.position; });
        // collapse duplicates
        std::vector<Atom> combined;
        for (const auto& a : merged) {
            if (!combined.empty() && combined.back().position == a.position)
                combined.back().mass += a.mass;
            else
                combined.push_back(a);
        }
        const auto mu12 = SpectralMeasure::from_atoms(combined, 501.0);
        const auto p1 = phi_transform(mu1, xg);
        const auto p2 = phi_transform(mu2, xg);
        const auto p12 = phi_transform(mu12, xg);
        for (size_t i = 0; i < xg.size(); i += 11)
            CHECK(p12.values[i] ==
                  doctest::Approx(p1.values[i] + p2.values[i]).epsilon(1e-12));
    }
    SUBCASE("imaginary pairs use the hyperbolic kernel") {
        const SpectralMeasure mu({}, std::nullopt, {{2.0, 0.25}}, true, 5.0);
        const auto phi = phi_transform(mu, xg);
        for (size_t i = 0; i < xg.size(); i += 13) {
            const double expected = 2.0 * 0.25 * (std::cosh(2.0 * xg[i]) - 1.0) / 4.0;
            CHECK(phi.values[i] == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalization checks at the origin") {
    SUBCASE("an exact |x| profile") {
        PhiFunction phi;
        for (double x = 0; x <= 1.0; x += 1e-3) {
            phi.grid.push_back(x);
            phi.values.push_back(x);
        }
        const auto rep = gl_check(phi, 0.0, kPi);
        CHECK(rep.certificate.verdict == "holds");
        CHECK(rep.phi_prime_0 == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(rep.inferred_h) <= 1e-6);
    }
    SUBCASE("a quadratic profile recovers the slope exactly") {
        PhiFunction phi;
        for (double x = 0; x <= 1.0; x += 1e-3) {
            phi.grid.push_back(x);
            phi.values.push_back(x - x * x / 2.0);
        }
        const auto rep = gl_check(phi, 1.0, kPi);
        CHECK(rep.certificate.verdict == "holds");
        CHECK(rep.inferred_h == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("a doubled measure fails the unit-slope requirement") {
        std::vector<double> xg;
        for (double x = 0; x <= 2e-2; x += 1e-3) xg.push_back(x);
        for (double x = 3e-2; x <= 1.0; x += 1e-2) xg.push_back(x);
        const auto mu = SpectralMeasure::lebesgue(2.0 / kPi, 1e4);
        const auto phi = phi_transform(mu, xg, 2.0 / kPi);
        const auto rep = gl_check(phi, 0.0, kPi);
        CHECK(rep.certificate.verdict == "fails");
        CHECK(rep.phi_prime_0 == doctest::Approx(2.0).epsilon(1e-4));
    }
}

TEST_CASE("distributional pairing") {
    const BumpFunction f{-2.5, 2.5};
    const auto ff = [&](double x) { return f(x); };
    const std::vector<double> sigmas = {1e-2, 5e-3, 2.5e-3};

    SUBCASE("continuum density: the transform identity is exact") {
        const auto mu = SpectralMeasure::lebesgue(1.0 / kPi, 1000.0);
        const auto rep = pairing_test(mu, ff, 2.5, sigmas);
        CHECK(rep.lhs == doctest::Approx(2.0 * f(0.0)).epsilon(1e-8));
        CHECK(rep.discrepancy <= 1e-8 * std::max(1.0, std::abs(rep.lhs)));
    }
    SUBCASE("unit lattice: summation formula inside the echo-free window") {
        const auto mu = SpectralMeasure::lattice(1.0, 1.0 / kPi, 256);
        const auto rep = pairing_test(mu, ff, 2.5, sigmas);
        CHECK(rep.discrepancy <= 1e-8 * std::max(1.0, std::abs(rep.lhs)));
    }
    SUBCASE("zero input") {
        const auto mu = SpectralMeasure::lattice(1.0, 1.0 / kPi, 64);
        const auto rep = pairing_test(mu, [](double) { return 0.0; }, 1.0, sigmas);
        CHECK(rep.lhs == 0.0);
        CHECK(rep.discrepancy == 0.0);
    }
}
