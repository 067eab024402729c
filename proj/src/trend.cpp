#include "typelab/trend.hpp"

#include <algorithm>
#include <cmath>

#include "typelab/errors.hpp"

namespace typelab {

std::string to_string(Trend t) {
    switch (t) {
        case Trend::converged: return "converged";
        case Trend::growing: return "growing";
        default: return "inconclusive";
    }
}

std::string to_string(DivergenceVerdict v) {
    switch (v) {
        case DivergenceVerdict::converged: return "converged";
        case DivergenceVerdict::diverging: return "diverging";
        default: return "inconclusive";
    }
}

Trend classify_increments(std::span<const double> increments) {
    const size_t m = increments.size();
    bool all_zero = true;
    for (double v : increments)
        if (v != 0.0) { all_zero = false; break; }
    if (all_zero) return Trend::converged;
    if (m < 3) return Trend::inconclusive;

    const double a = std::abs(increments[m - 3]);
    const double b = std::abs(increments[m - 2]);
    const double c = std::abs(increments[m - 1]);

    if (a == 0.0) {
        // Compare the surviving pair only.
        if (c == 0.0 || (b > 0.0 && c <= 0.5 * b)) return Trend::converged;
        if (b > 0.0 && c >= 2.0 * b) return Trend::growing;
        return Trend::inconclusive;
    }
    if (c <= 0.5 * a && c <= b) return Trend::converged;
    if (c >= 2.0 * a && c >= b) return Trend::growing;
    return Trend::inconclusive;
}

Trend classify_partials(std::span<const double> partials) {
    if (partials.size() < 2) return Trend::inconclusive;
    std::vector<double> inc(partials.size() - 1);
    for (size_t i = 1; i < partials.size(); ++i) inc[i - 1] = partials[i] - partials[i - 1];
    return classify_increments(inc);
}

DivergenceVerdict divergence_verdict(std::span<const double> partials) {
    Trend t = classify_partials(partials);
    if (t == Trend::converged) return DivergenceVerdict::converged;
    if (t == Trend::growing) return DivergenceVerdict::diverging;
    if (partials.size() < 2) return DivergenceVerdict::inconclusive;
    // Constant-rate growth (e.g. logarithmic divergence) never decays; call it
    // diverging when the tail increment stays a visible fraction of the total.
    const double last = std::abs(partials.back() - partials[partials.size() - 2]);
    const double scale = std::max(1.0, std::abs(partials.back()));
    if (last >= 1e-6 * scale) return DivergenceVerdict::diverging;
    return DivergenceVerdict::inconclusive;
}

std::vector<double> geometric_windows(double r0, double factor, int count) {
    if (!(r0 > 0) || !(factor > 1) || count < 1)
        throw validation_error("geometric_windows: need r0 > 0, factor > 1, count >= 1");
    std::vector<double> w(count);
    double r = r0;
    for (int i = 0; i < count; ++i, r *= factor) w[i] = r;
    return w;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw validation_error("fit_line: need matching x/y with at least two points");
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0) throw validation_error("fit_line: degenerate abscissae");
    LineFit f;
    f.points = n;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    return f;
}

} // namespace typelab
