#ifndef TYPELAB_STURM_LIOUVILLE_HPP
#define TYPELAB_STURM_LIOUVILLE_HPP

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "typelab/certificate.hpp"
#include "typelab/measure.hpp"

namespace typelab {

struct Potential {
    enum class Kind { zero, constant, sampled };
    Kind kind = Kind::zero;
    double value = 0;                 // constant case
    std::vector<double> grid;         // sampled case
    std::vector<double> values;

    double operator()(double x) const;
    static Potential zero();
    static Potential constant(double c);
    static Potential sampled(std::vector<double> grid, std::vector<double> values);
};

// -y'' + q y = l^2 y on [0, a) with y(0) = 1, y'(0) = h.
struct SLProblem {
    double a = std::numeric_limits<double>::infinity();
    Potential q;
    double h = 0;

    double Q(double x) const;  // int_0^x |q|
};

// Fixed-step fourth-order integration with a step-halving check; returns the
// solution sampled on the requested grid.
std::vector<std::complex<double>> solve_omega(const SLProblem& problem,
                                              std::complex<double> lambda,
                                              std::span<const double> x_grid);

struct OmegaBoundReport {
    double lhs = 0;   // |omega - cos(l x)|
    double rhs = 0;   // e^{x |Im l|} (Q(x)+|h|)/(|l| - Q(x))
    double slack = 0; // rhs - lhs
    bool vacuous = false;  // |l| <= Q(x)
    bool holds = false;
};

OmegaBoundReport omega_bound_check(const SLProblem& problem, std::complex<double> lambda,
                                   double x);

// W f(l) = int_0^a f(x) omega(l, x) dx for f supported away from the right
// endpoint; evaluated against the cached solve on a shared quadrature grid.
std::vector<double> weyl_transform(const std::function<double(double)>& f,
                                   double support_hi, const SLProblem& problem,
                                   std::span<const double> lambda_grid);

struct ParsevalReport {
    double norm_f_sq = 0;
    double norm_transform_sq = 0;
    double relative_error = 0;
    double tail_bound = 0;       // bound on the measure mass never evaluated
    double lambda_cut = 0;       // transforms beyond this were bounded, not summed
};

ParsevalReport parseval_check(const std::function<double(double)>& f, double support_hi,
                              const SLProblem& problem, const SpectralMeasure& mu);

struct PhiFunction {
    std::vector<double> grid;    // x >= 0
    std::vector<double> values;  // Phi(x)
    double operator()(double x) const;  // linear interpolation, even extension
};

// Phi(x) = int (1 - cos(l x))/l^2 dmu over R u iR; atom at zero contributes
// x^2/2 per unit mass.  When tail_level is set, the density is continued
// beyond the truncation radius at that level and integrated analytically.
PhiFunction phi_transform(const SpectralMeasure& mu, std::span<const double> x_grid,
                          std::optional<double> tail_level = std::nullopt);

struct GlCheckReport {
    Certificate certificate;
    double phi_prime_0 = 0;      // one-sided derivative estimate at 0
    double phi_second_0 = 0;
    double inferred_h = 0;       // -Phi''(+0)
    double fit_window = 0;
    double c3_proxy = 0;         // max scaled third difference on the grid
    double c3_cauchy_ratio = 0;  // stability of the proxy under coarsening
};

GlCheckReport gl_check(const PhiFunction& phi, double expected_h, double a);

struct PairingReport {
    double lhs = 0;                        // int of the transform against mu
    std::vector<double> sigma;             // regularization widths
    std::vector<double> rhs;               // 2 f(0) + smoothed remainder integral
    double rhs_extrapolated = 0;
    double discrepancy = 0;                // |lhs - rhs_extrapolated|
};

PairingReport pairing_test(const SpectralMeasure& mu,
                           const std::function<double(double)>& f, double support_radius,
                           std::span<const double> sigma_list);

} // namespace typelab

#endif
