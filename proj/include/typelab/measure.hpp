#ifndef TYPELAB_MEASURE_HPP
#define TYPELAB_MEASURE_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "typelab/certificate.hpp"
#include "typelab/trend.hpp"

namespace typelab {

struct Atom {
    double position;
    double mass;
};

// One entry describes the symmetric pair of point masses at +i*height and
// -i*height, each carrying `mass`.
struct ImagAtom {
    double height;
    double mass;
};

// Nonnegative piecewise-linear density with bounded support; zero outside the
// grid.  Integrals against smooth weights use per-segment Gauss panels with a
// local tolerance well under 1e-12.
struct PiecewiseDensity {
    std::vector<double> grid;    // strictly increasing
    std::vector<double> values;  // same length, >= 0

    void validate() const;
    double operator()(double x) const;
    double integrate(double lo, double hi) const;  // exact for the PL interpolant
    double integrate_weighted(double lo, double hi,
                              const std::function<double(double)>& w) const;
};

// Measures on R u iR: atoms plus an optional sampled density on the real
// axis, and symmetric atom pairs on the imaginary axis.  Truncated objects:
// `truncation_radius` is part of the value and is echoed into every verdict.
class SpectralMeasure {
public:
    SpectralMeasure(std::vector<Atom> real_atoms,
                    std::optional<PiecewiseDensity> real_density,
                    std::vector<ImagAtom> imag_atoms, bool symmetric,
                    double truncation_radius);

    static SpectralMeasure from_atoms(std::vector<Atom> atoms, double radius,
                                      bool symmetric = false);
    // Unit-spacing-style lattice: atoms at spacing*k, |k| <= count, equal mass.
    static SpectralMeasure lattice(double spacing, double mass, int count);
    // Constant density on [-radius, radius].
    static SpectralMeasure lebesgue(double level, double radius);

    const std::vector<Atom>& real_atoms() const { return real_atoms_; }
    const std::optional<PiecewiseDensity>& real_density() const { return real_density_; }
    const std::vector<ImagAtom>& imag_atoms() const { return imag_atoms_; }
    bool symmetric() const { return symmetric_; }
    double truncation_radius() const { return truncation_radius_; }

    // Mass of the closed interval [lo, hi]; atoms exact, density by quadrature
    // exact for the PL interpolant.
    double mass(double lo, double hi) const;
    double atomic_mass(double lo, double hi) const;

    // Sum of w over real atoms in ascending |position| order (strict mode).
    double sum_atoms(const std::function<double(const Atom&)>& w) const;

    SpectralMeasure scaled(double factor) const;

private:
    std::vector<Atom> real_atoms_;
    std::optional<PiecewiseDensity> real_density_;
    std::vector<ImagAtom> imag_atoms_;
    bool symmetric_ = false;
    double truncation_radius_ = 0;
};

// Closed interval [x - k*e^{-delta|x|}, x + k*e^{-delta|x|}].
struct ExpInterval {
    double center;
    double delta;
    double scale = 1.0;

    double half_length() const;
    double lo() const;
    double hi() const;
};

struct MajorizationWitness {
    double delta = 0;
    double C = 0;
    int n = 0;
    std::vector<double> violations;  // grid centers where the inequality fails
    bool holds() const { return violations.empty(); }
};

// ---- growth -------------------------------------------------------------

struct GrowthEntry {
    double s;
    std::vector<double> partials;  // one per window
    Trend trend;
};

struct GrowthReport {
    std::vector<GrowthEntry> entries;
    std::optional<double> minimal_s;  // smallest s on the grid with converged trend
};

// Partial integrals of 1/(1+|x|)^{2s} d mu over [-w, w] for each window w.
GrowthReport polynomial_growth_exponent(const SpectralMeasure& mu,
                                        std::span<const double> s_grid,
                                        std::span<const double> windows);

// ---- majorization -------------------------------------------------------

// Evaluates mu(I_x) <= C (1+|x|)^n (mu_tilde(2 I_x) + e^{-2 delta |x|}) at
// every grid center.  Refuses grids that undersample the shrinking intervals:
// around every support point p of mu the grid must walk through 2*I_p with
// local spacing <= e^{-delta|p|}/4.
MajorizationWitness majorization_check(const SpectralMeasure& mu,
                                       const SpectralMeasure& mu_tilde, double delta,
                                       int n, double C, std::span<const double> x_grid);

// Builds an adequate non-uniform grid: fine clusters around every atom of
// either measure plus a coarse sweep over any density support.
std::vector<double> make_majorization_grid(const SpectralMeasure& mu,
                                           const SpectralMeasure& mu_tilde,
                                           double delta);

struct MajorizationLattice {
    std::vector<double> deltas = {1.0, 0.5, 0.25};
    std::vector<int> ns = {0, 1, 2, 3, 4};
    std::vector<double> Cs = {1, 10, 100, 1e3, 1e4, 1e5, 1e6};
};

// First witness on the lattice with no violations, or nullopt.
std::optional<MajorizationWitness> majorization_search(
    const SpectralMeasure& mu, const SpectralMeasure& mu_tilde,
    const MajorizationLattice& lattice = {});

struct WeakEquivalenceReport {
    MajorizationWitness forward;   // mu  <= C (...) mu_tilde
    MajorizationWitness backward;  // mu_tilde <= C (...) mu
    bool equivalent = false;
};

WeakEquivalenceReport weak_equivalence_check(const SpectralMeasure& mu,
                                             const SpectralMeasure& nu, double delta,
                                             int n, double C);

// ---- tails --------------------------------------------------------------

// psi(lambda) = (mu_R - mu_0)((lambda, +inf)) restricted to the common
// truncation; piecewise constant from the atomic parts (suffix sums are
// exact), plus an optional sampled density correction.
class TailFunction {
public:
    TailFunction(std::vector<double> breakpoints, std::vector<double> suffix,
                 double radius);

    double operator()(double lambda) const;
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    double radius() const { return radius_; }
    // Largest point up to which psi is not identically zero (0 if psi == 0).
    double last_nonzero() const;

    // Exact integral of e^{delta*l} |psi(l)| over [0, hi] (atomic part).
    double weighted_abs_integral(double delta, double hi) const;

private:
    std::vector<double> breakpoints_;  // ascending merged atom positions
    std::vector<double> suffix_;       // suffix_[i] = signed mass at positions >= breakpoints_[i]
    double radius_;
};

struct TailDifferenceResult {
    TailFunction psi;
    std::vector<double> grid;
    std::vector<double> values;  // psi sampled on grid
};

TailDifferenceResult tail_difference(const SpectralMeasure& mu_R,
                                     const SpectralMeasure& mu_0,
                                     std::span<const double> lambda_grid);

// Certificate on the weighted tail integral int_0^inf e^{delta l}|psi| dl.
Certificate proximity_test(const TailFunction& psi, double delta);

enum class ImagTailMode { gaussian, exponential };

// Gaussian mode: sum m_k e^{delta y_k^2}; exponential mode: sum m_k e^{x y_k}
// (one atom of each symmetric pair lies on the positive half-axis).
Certificate imag_tail_test(const SpectralMeasure& mu, double delta, ImagTailMode mode,
                           double x = 0);

} // namespace typelab

#endif
