#ifndef TYPELAB_TREND_HPP
#define TYPELAB_TREND_HPP

#include <span>
#include <string>
#include <vector>

namespace typelab {

// All asymptotic statements in this library are reduced to one desk-scale rule
// applied to partial sums over increasing windows.  A verdict is a statement
// about the tested range, never about the untruncated object.
enum class Trend { converged, growing, inconclusive };

std::string to_string(Trend t);

// Classifies the last three window increments:
//   converged  - they decay by a factor >= 2 across the triple,
//   growing    - they grow by a factor >= 2 across the triple,
//   inconclusive otherwise (including too few increments).
// Magnitudes are used, so sums drifting to -inf register as growing.
Trend classify_increments(std::span<const double> increments);

// Convenience: increments are formed from consecutive partial sums.
Trend classify_partials(std::span<const double> partials);

// Divergence evidence for integrals like the logarithmic integral, where the
// partial sums may grow linearly in the window index (constant increments).
// Maps growing -> diverging, converged -> converged, and persistent
// non-decaying increments -> diverging.
enum class DivergenceVerdict { converged, diverging, inconclusive };

std::string to_string(DivergenceVerdict v);

DivergenceVerdict divergence_verdict(std::span<const double> partials);

// Geometric window radii r0 * factor^j, j = 0..count-1.
std::vector<double> geometric_windows(double r0, double factor, int count);

// Least-squares line through (x, y) pairs.
struct LineFit {
    double slope = 0;
    double intercept = 0;
    double rms_residual = 0;
    int points = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace typelab

#endif
