#ifndef TYPELAB_TYPE_CERTIFICATES_HPP
#define TYPELAB_TYPE_CERTIFICATES_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "typelab/certificate.hpp"
#include "typelab/entire.hpp"
#include "typelab/measure.hpp"

namespace typelab {

// Reference models with a known exact type: lattice sums, Lebesgue measure,
// finite point sets.
enum class ReferenceModel { arithmetic_progression, lebesgue, point_mass };

Certificate reference_type(ReferenceModel model, double ell = 1.0);

// Holds iff the K-weighted mass converges while the logarithmic integral of K
// diverges; K >= 1 with a grid-checked uniform-continuity modulus for log K.
Certificate zero_type_certificate(const SpectralMeasure& mu,
                                  const std::function<double(double)>& K,
                                  std::span<const double> windows);

// Holds iff the log-density integral stays bounded below (trend-converged);
// density must be bounded.  Zero samples contribute -inf and force failure.
Certificate szego_infinite_type(const PiecewiseDensity& density,
                                std::span<const double> windows);

// Window-mass floor gives the printed lower bound 2 pi / L; when the caller
// supplies a known exact type that the bound exceeds, the certificate carries
// a consistency flag instead of silently standing.
Certificate duffin_schaeffer(const SpectralMeasure& mu, double L, double delta,
                             std::span<const double> x_grid,
                             std::optional<double> known_exact_type = std::nullopt);

// Lattice weights: sum w(n)/(1+n^2) converges and sum log w(n)/(1+n^2) stays
// bounded below => type pi.
Certificate koosis_lattice(const std::function<double(int)>& omega, int N_max);

struct AnnihilatorLowerBoundReport {
    Certificate certificate;
    struct Entry {
        std::string name;
        double type;
        AnnihilationReport report;
    };
    std::vector<Entry> residuals;
    std::string membership_route;  // "l2-direct", "krein-weight", or "none"
    double envelope_c = 0;         // fitted floor coefficient of |H'(l)|/(1+|l|)
};

// T(mu) >= a via the annihilating functional of H: every test-family member
// below the claimed type must annihilate, and the functional must be seen to
// act on L^2(mu) either directly (sum 1/|H'|^2 converges) or through a
// polynomial Krein-class weight.  When neither membership route certifies,
// the verdict is inconclusive and the caveat is recorded.
AnnihilatorLowerBoundReport annihilator_lower_bound(const SpectralMeasure& mu,
                                                    const CanonicalProduct& H,
                                                    std::span<const TestFunction> test_family,
                                                    double claimed_type);

} // namespace typelab

#endif
