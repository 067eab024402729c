#ifndef TYPELAB_NAZAROV_HPP
#define TYPELAB_NAZAROV_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "typelab/certificate.hpp"
#include "typelab/entire.hpp"
#include "typelab/measure.hpp"
#include "typelab/trend.hpp"

namespace typelab {

// Odd smooth diffeomorphism of R with closed-form first derivative and a
// numeric inverse; higher derivatives come from nested central differences of
// the derivative evaluator.
class GammaDiffeo {
public:
    enum class Family { identity, arctan_shift, arcsinh_shift, custom };

    static GammaDiffeo identity();
    static GammaDiffeo arctan_shift(double beta);   // t + beta*arctan(t), beta > -1
    static GammaDiffeo arcsinh_shift(double beta);  // t + beta*arcsinh(t), beta > -1
    // odd map supplied directly; the caller owns the class-membership question
    static GammaDiffeo custom(std::function<double(double)> x,
                              std::function<double(double)> dx);

    double operator()(double t) const { return x_(t); }
    double derivative(double t) const { return dx_(t); }
    // k >= 2, nested central differences with step scaled to |t|
    double higher_derivative(int k, double t) const;
    // monotone bisection plus Newton polish
    double inverse(double y) const;

    Family family() const { return family_; }
    double beta() const { return beta_; }
    std::string family_name() const;

private:
    GammaDiffeo(Family fam, double beta, std::function<double(double)> x,
                std::function<double(double)> dx);

    Family family_;
    double beta_;
    std::function<double(double)> x_;
    std::function<double(double)> dx_;
};

struct GammaCheckReport {
    Certificate certificate;
    std::vector<double> fitted_decay;  // fitted exponent of |X^(k)| per k = 2..k_max
    double derivative_limit_gap = 0;   // max |X'-1| on the outer decade of the grid
};

// Verifies X' -> 1 and fits the decay exponents of the higher derivatives by
// log-log regression; verdict holds iff the exponents are positive and
// increasing with k.
GammaCheckReport gamma_check(const GammaDiffeo& X, std::span<const double> t_grid,
                             int k_max);

// Atoms at X(ck) with masses X'(ck), |k| <= K.
SpectralMeasure build_measure(const GammaDiffeo& X, double c, int K);

// Smooth frequency window: transform equal to s on (-a,a), a bump-based ramp
// down to 0 at +-b, scaled so that the unit-lattice periodization of the time
// profile equals 1/(2 pi).  The time profile is precomputed once on a fixed
// 2^18-sample half-grid and interpolated with 6-point stencils.
class SchwartzWindow {
public:
    SchwartzWindow(double inner_a, double outer_b);

    double inner() const { return a_; }
    double outer() const { return b_; }
    double transform(double xi) const;  // plateau value 1 on (-a, a)
    double time_profile(double x) const;
    double cutoff() const { return cutoff_; }  // |phi| below 1e-17 past this

private:
    double a_, b_;
    double grid_step_;
    double cutoff_;
    std::shared_ptr<std::vector<double>> samples_;  // phi on j*grid_step_, j >= 0
};

struct PoissonDecayReport {
    std::vector<double> t;
    std::vector<double> D;      // (mu * phi)(t) - 1/(2 pi)
    double max_abs_D = 0;
    LineFit loglog_fit;         // log|D| vs log t over the fitting range
    bool superpolynomial_consistent = false;
    double N_target = 4;
};

// Samples below fit_floor sit at the numerical noise floor of the lattice sum
// and are excluded from the decay fit.
PoissonDecayReport poisson_decay_test(const SpectralMeasure& mu, const SchwartzWindow& window,
                                      std::span<const double> t_grid, double c,
                                      double fit_lo = 20, double fit_hi = 500,
                                      double N_target = 4, double fit_floor = 1e-11);

struct StableOrthogonalityReport {
    Certificate certificate;
    bool shift_unbounded = false;     // X(t) - t increases without bound on the grid
    KreinExclusionReport exclusion;
};

StableOrthogonalityReport stable_orthogonality_certificate(const GammaDiffeo& X, double c,
                                                           double R_max,
                                                           std::span<const double> A_list);

} // namespace typelab

#endif
