#include "typelab/entire.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "typelab/errors.hpp"
#include "typelab/numeric.hpp"

namespace typelab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// polygamma values by recurrence into the asymptotic range
double trigamma(double x) {
    double s = 0;
    while (x < 24) {
        s += 1.0 / (x * x);
        x += 1;
    }
    const double ix = 1.0 / x;
    return s + ix * (1 + ix * (0.5 + ix * (1.0 / 6 + ix * ix * (-1.0 / 30 + ix * ix / 42))));
}

double psi3(double x) {
    double s = 0;
    while (x < 24) {
        s += 6.0 / (x * x * x * x);
        x += 1;
    }
    const double ix = 1.0 / x;
    return s + ix * ix * ix * (2.0 + ix * (3.0 + ix * (2.0 - ix * ix)));
}

double psi5(double x) {
    double s = 0;
    while (x < 24) {
        s += 120.0 / std::pow(x, 6);
        x += 1;
    }
    const double ix = 1.0 / x;
    return std::pow(ix, 5) * (24.0 + ix * (60.0 + ix * 60.0)) + s;
}

// The zeros are continued past the stored range as an arithmetic sequence
// x_N + j*gap.  The omitted log-product log prod_{j>=1} (1 - z^2/(x_N+j g)^2)
// is then exactly a second difference of log Gamma; a polygamma series covers
// the small-|z| regime where the lgamma difference would cancel.
using TailModel = ProductTailModel;

double arith_tail_log_real(const TailModel& m, double z) {
    if (!m.valid) return 0.0;
    const double w = std::abs(z) / m.d;
    if (w >= m.c) return 0.0;  // past the first model zero: no finite value
    if (w <= 0.02 * m.c) {
        const double w2 = w * w;
        return -(w2 * trigamma(m.c) + w2 * w2 * psi3(m.c) / 12.0 +
                 w2 * w2 * w2 * psi5(m.c) / 360.0);
    }
    return 2.0 * std::lgamma(m.c) - std::lgamma(m.c - w) - std::lgamma(m.c + w);
}

std::complex<double> arith_tail_log_complex(const TailModel& m, std::complex<double> z) {
    if (!m.valid) return {0.0, 0.0};
    const std::complex<double> w = z / m.d;
    if (std::abs(w) > 0.25 * m.c) return {0.0, 0.0};  // bar picks up the slack
    const std::complex<double> w2 = w * w;
    return -(w2 * trigamma(m.c) + w2 * w2 * psi3(m.c) / 12.0 +
             w2 * w2 * w2 * psi5(m.c) / 360.0);
}

// d/dz of the real tail correction, for logarithmic derivatives off the zeros
double arith_tail_log_derivative(const TailModel& m, double z) {
    if (!m.valid) return 0.0;
    const double w = z / m.d;
    if (std::abs(w) > 0.25 * m.c) {
        const double h = 1e-4 * m.d;
        return (arith_tail_log_real(m, z + h) - arith_tail_log_real(m, z - h)) / (2.0 * h);
    }
    return -(2.0 * w * trigamma(m.c) + w * w * w * psi3(m.c) / 3.0 +
             std::pow(w, 5) * psi5(m.c) / 60.0) / m.d;
}
} // namespace

std::complex<double> ProductValue::value() const {
    if (at_zero) return {0.0, 0.0};
    return std::exp(log_abs) * phase;
}

CanonicalProduct::CanonicalProduct(std::vector<double> positive_zeros, bool zero_at_origin,
                                   double normalization, double nominal_type)
    : positive_zeros_(std::move(positive_zeros)),
      zero_at_origin_(zero_at_origin),
      normalization_(normalization),
      nominal_type_(nominal_type) {
    if (normalization_ == 0.0) throw validation_error("product: zero normalization");
    for (size_t i = 0; i < positive_zeros_.size(); ++i) {
        if (!(positive_zeros_[i] > 0)) throw validation_error("product: zeros must be positive");
        if (i && !(positive_zeros_[i] > positive_zeros_[i - 1]))
            throw validation_error("product: zeros must be strictly increasing (simple)");
    }
    // Summability gate: partial sums of 1/x_k^2 over doubling radius windows
    // must show the converged trend before we accept the zero set.  Only full
    // windows participate; a truncated final fragment would fake decay.
    if (positive_zeros_.size() >= 32) {
        std::vector<double> partials;
        double r = positive_zeros_.front() * 2.0;
        size_t i = 0;
        KahanSum acc;
        while (r <= positive_zeros_.back()) {
            while (i < positive_zeros_.size() && positive_zeros_[i] <= r) {
                acc.add(1.0 / (positive_zeros_[i] * positive_zeros_[i]));
                ++i;
            }
            partials.push_back(acc.value());
            r *= 2.0;
        }
        if (partials.size() >= 4 && classify_partials(partials) != Trend::converged)
            throw validation_error("product: sum of 1/x_k^2 shows no convergence trend on the stored range");
    }
    deriv_cache_.assign(positive_zeros_.size(), kNaN);
}

CanonicalProduct CanonicalProduct::sinc_pi(int K) {
    std::vector<double> z(K);
    for (int k = 1; k <= K; ++k) z[k - 1] = k;
    return CanonicalProduct(std::move(z), false, 1.0, std::numbers::pi);
}

CanonicalProduct CanonicalProduct::sin_pi(int K) {
    std::vector<double> z(K);
    for (int k = 1; k <= K; ++k) z[k - 1] = k;
    return CanonicalProduct(std::move(z), true, std::numbers::pi, std::numbers::pi);
}

CanonicalProduct CanonicalProduct::cos_pi(int K) {
    std::vector<double> z(K);
    for (int k = 1; k <= K; ++k) z[k - 1] = k - 0.5;
    return CanonicalProduct(std::move(z), false, 1.0, std::numbers::pi);
}

std::vector<double> CanonicalProduct::all_zeros() const {
    std::vector<double> z;
    z.reserve(2 * positive_zeros_.size() + 1);
    for (auto it = positive_zeros_.rbegin(); it != positive_zeros_.rend(); ++it)
        z.push_back(-*it);
    if (zero_at_origin_) z.push_back(0.0);
    for (double x : positive_zeros_) z.push_back(x);
    return z;
}

double CanonicalProduct::tail_gap() const {
    const size_t n = positive_zeros_.size();
    if (n < 2) return 0.0;
    const size_t m = std::min<size_t>(64, n - 1);
    return (positive_zeros_[n - 1] - positive_zeros_[n - 1 - m]) / static_cast<double>(m);
}

ProductValue CanonicalProduct::eval(std::complex<double> z, size_t truncation,
                                    TailPolicy policy) const {
    if (truncation > positive_zeros_.size())
        throw validation_error("eval: truncation exceeds stored zero count");
    ProductValue out;

    const bool real_input = (z.imag() == 0.0);
    if (real_input) {
        const double xr = std::abs(z.real());
        auto it = std::lower_bound(positive_zeros_.begin(),
                                   positive_zeros_.begin() + truncation, xr);
        if ((it != positive_zeros_.begin() + truncation && *it == xr) ||
            (zero_at_origin_ && z.real() == 0.0)) {
            out.at_zero = true;
            out.zero_position = z.real();
            return out;
        }
    }

    KahanSum log_acc;
    double angle = 0.0;
    int sign_flips = 0;

    log_acc.add(std::log(std::abs(normalization_)));
    if (normalization_ < 0) ++sign_flips;
    if (zero_at_origin_) {
        if (z == std::complex<double>(0.0, 0.0)) {
            out.at_zero = true;
            return out;
        }
        if (real_input) {
            log_acc.add(std::log(std::abs(z.real())));
            if (z.real() < 0) ++sign_flips;
        } else {
            log_acc.add(std::log(std::abs(z)));
            angle += std::arg(z);
        }
    }

    for (size_t k = 0; k < truncation; ++k) {
        const double x = positive_zeros_[k];
        if (real_input) {
            // (x - t)(x + t)/x^2 keeps precision near the zero
            const double t = z.real();
            const double f = (x - t) * (x + t) / (x * x);
            log_acc.add(std::log(std::abs(f)));
            if (f < 0) ++sign_flips;
        } else {
            const std::complex<double> f = (x - z) * (x + z) / (x * x);
            log_acc.add(std::log(std::abs(f)));
            angle += std::arg(f);
        }
    }

    if (policy == TailPolicy::pair_log_bound && truncation > 0 &&
        truncation == positive_zeros_.size()) {
        const TailModel m = tail_model();
        if (real_input) {
            log_acc.add(arith_tail_log_real(m, z.real()));
        } else {
            const auto corr = arith_tail_log_complex(m, z);
            log_acc.add(corr.real());
            angle += corr.imag();
        }
        out.tail_log_bound = tail_bar(z, real_input);
    } else if (policy == TailPolicy::pair_log_bound && truncation > 0) {
        // truncating inside the stored range: bound the skipped stored factors
        const double az2 = std::norm(z);
        KahanSum bound;
        for (size_t k = truncation; k < positive_zeros_.size(); ++k) {
            const double w = az2 / (positive_zeros_[k] * positive_zeros_[k]);
            bound.add(w < 0.5 ? -std::log1p(-w) : 1.0);
        }
        const TailModel m = tail_model();
        if (m.valid) bound.add(std::abs(arith_tail_log_real(m, std::abs(z))));
        out.tail_log_bound = bound.value();
    }

    out.log_abs = log_acc.value();
    if (real_input)
        out.phase = (sign_flips % 2) ? -1.0 : 1.0;
    else
        out.phase = std::polar(1.0, angle);
    return out;
}

ProductTailModel CanonicalProduct::tail_model() const {
    TailModel m;
    const double gap = tail_gap();
    if (!(gap > 0) || positive_zeros_.empty()) return m;
    m.d = gap;
    m.c = 1.0 + positive_zeros_.back() / gap;
    m.valid = true;
    return m;
}

double CanonicalProduct::gap_spread() const {
    const size_t n = positive_zeros_.size();
    if (n < 3) return 0.0;
    const size_t m = std::min<size_t>(64, n - 1);
    double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
    for (size_t i = n - m; i < n; ++i) {
        const double g = positive_zeros_[i] - positive_zeros_[i - 1];
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
    }
    const double d = tail_gap();
    return d > 0 ? (gmax - gmin) / d : 0.0;
}

double CanonicalProduct::tail_bar(std::complex<double> z, bool real_input) const {
    const TailModel m = tail_model();
    if (!m.valid) return 0.0;
    const double w = std::abs(z) / m.d;
    // irregular gaps make the arithmetic continuation a model, not a fact
    double bar = w * w * trigamma(m.c) * gap_spread();
    if (real_input && w > 0.02 * m.c) {
        bar += 4.0 * std::abs(std::lgamma(m.c)) * 1e-16 + 1e-12;  // lgamma route rounding
    } else if (!real_input && w > 0.25 * m.c) {
        bar += w * w * trigamma(m.c);  // no correction applied on this path
    } else {
        bar += std::pow(w, 8) * 720.0 / (10080.0 * std::pow(m.c, 7));  // series remainder
    }
    return bar;
}

double CanonicalProduct::log_derivative_mag(size_t j) const {
    const double xj = positive_zeros_[j];
    KahanSum acc;
    for (size_t k = 0; k < positive_zeros_.size(); ++k) {
        if (k == j) continue;
        const double x = positive_zeros_[k];
        acc.add(std::log(std::abs(x - xj)) + std::log(x + xj) - 2.0 * std::log(x));
    }
    acc.add(arith_tail_log_real(tail_model(), xj));
    return acc.value();
}

double CanonicalProduct::derivative_at(double zero) const {
    if (zero == 0.0) {
        if (!zero_at_origin_) throw validation_error("derivative_at: 0 is not a zero");
        return normalization_;
    }
    const double x = std::abs(zero);
    auto it = std::lower_bound(positive_zeros_.begin(), positive_zeros_.end(), x);
    if (it == positive_zeros_.end() || *it != x)
        throw validation_error("derivative_at: not a stored zero: " + std::to_string(zero));
    const size_t j = static_cast<size_t>(it - positive_zeros_.begin());

    if (std::isnan(deriv_cache_[j])) {
        const double logmag = log_derivative_mag(j);
        // sign of prod_{k != j} (x_k - x_j): negative for each k < j
        int flips = static_cast<int>(j);
        if (normalization_ < 0) ++flips;
        double lead;
        if (zero_at_origin_)
            lead = std::log(2.0 * std::abs(normalization_));  // x_j * (-2/x_j) * c
        else
            lead = std::log(2.0 * std::abs(normalization_) / positive_zeros_[j]);
        ++flips;  // the -2 factor
        const double mag = std::exp(lead + logmag);
        deriv_cache_[j] = (flips % 2) ? -mag : mag;
    }
    const double d = deriv_cache_[j];
    if (zero > 0) return d;
    // even product -> odd derivative; odd product -> even derivative
    return zero_at_origin_ ? d : -d;
}

double CanonicalProduct::derivative_real(double x) const {
    // F'(x) = F(x) * dlog|F|/dx away from zeros
    const ProductValue v = eval(x, positive_zeros_.size(), TailPolicy::pair_log_bound);
    if (v.at_zero) return derivative_at(x);
    KahanSum logder;
    if (zero_at_origin_) logder.add(1.0 / x);
    for (double xk : positive_zeros_) {
        logder.add(-2.0 * x / ((xk - x) * (xk + x)));
    }
    logder.add(arith_tail_log_derivative(tail_model(), x));
    return v.value().real() * logder.value();
}

// ---- krein_sum ------------------------------------------------------------------

KreinSumReport krein_sum(const CanonicalProduct& F, const Weight& W) {
    KreinSumReport rep;
    rep.certificate.statement = "krein-weighted-derivative-sum";
    rep.certificate.anchor = "sum of W(l)/|F'(l)| over the zero set stays finite";
    rep.certificate.direction = "predicate";

    const auto& zeros = F.positive_zeros();
    if (zeros.size() > 20000)
        throw validation_error("krein_sum: zero set too large for an exact derivative sweep");
    if (zeros.empty() && !F.zero_at_origin()) {
        rep.certificate.verdict = "finite";
        rep.certificate.value = 0.0;
        rep.trend = Trend::converged;
        return rep;
    }
    const double x_max = zeros.empty() ? 1.0 : zeros.back();
    rep.certificate.truncation_radius = x_max;

    const int n_windows = 8;
    rep.window_radii.resize(n_windows);
    for (int i = 0; i < n_windows; ++i)
        rep.window_radii[i] = x_max / std::pow(2.0, n_windows - 1 - i);

    bool conditioning_failure = false;
    double bad_zero = 0;
    std::vector<double> inv_derivs(zeros.size());
    for (size_t j = 0; j < zeros.size(); ++j) {
        const double d = std::abs(F.derivative_at(zeros[j]));
        if (d < 1e-300) {
            conditioning_failure = true;
            bad_zero = zeros[j];
            inv_derivs[j] = 0;
        } else {
            inv_derivs[j] = 1.0 / d;
        }
    }
    if (conditioning_failure) {
        rep.certificate.verdict = "inconclusive";
        rep.certificate.evidence["conditioning_failure_at"] = bad_zero;
        return rep;
    }

    const double origin_term =
        F.zero_at_origin() ? W(0.0) / std::abs(F.derivative_at(0.0)) : 0.0;
    for (double R : rep.window_radii) {
        KahanSum acc;
        acc.add(origin_term);
        for (size_t j = 0; j < zeros.size() && zeros[j] <= R; ++j) {
            const double wp = W(zeros[j]);
            const double wm = W(-zeros[j]);
            if (wp != std::numeric_limits<double>::infinity()) acc.add(wp * inv_derivs[j]);
            if (wm != std::numeric_limits<double>::infinity()) acc.add(wm * inv_derivs[j]);
        }
        rep.partials.push_back(acc.value());
    }
    rep.trend = classify_partials(rep.partials);
    rep.certificate.value = rep.partials.back();
    rep.certificate.verdict = rep.trend == Trend::converged
                                  ? "finite"
                                  : (rep.trend == Trend::growing ? "growing" : "inconclusive");
    rep.certificate.evidence["partials"] = rep.partials;

    // absolute-convergence diagnostic for the partial-fraction representation
    for (int N = 0; N <= 6 && !rep.abs_convergence_N; ++N) {
        std::vector<double> partials;
        for (double R : rep.window_radii) {
            KahanSum acc;
            for (size_t j = 0; j < zeros.size() && zeros[j] <= R; ++j)
                acc.add(2.0 * inv_derivs[j] / std::pow(zeros[j], N + 1));
            partials.push_back(acc.value());
        }
        if (classify_partials(partials) == Trend::converged) rep.abs_convergence_N = N;
    }
    if (rep.abs_convergence_N)
        rep.certificate.evidence["abs_convergence_N"] = *rep.abs_convergence_N;
    return rep;
}

// ---- annihilation ------------------------------------------------------------------

TestFunction sinc_sq(double b, double shift) {
    if (!(b > 0)) throw validation_error("sinc_sq: b must be positive");
    TestFunction tf;
    tf.f = [b, shift](double x) {
        const double u = b * (x - shift);
        if (std::abs(u) < 1e-8) return 1.0 - u * u / 3.0;
        const double s = std::sin(u) / u;
        return s * s;
    };
    tf.exponential_type = 2.0 * b;
    tf.envelope_p = 2.0;
    // probe the finite range, then the asymptotic 1/(b(x-shift))^2 shape
    double A = 0;
    for (double x = -50; x <= 50; x += 0.1)
        A = std::max(A, tf.f(x) * std::pow(1.0 + std::abs(x), 2.0));
    A = std::max(A, (1.0 / (b * b)) * std::pow(1.0 + 2.0 * std::abs(shift) + 2.0, 2.0));
    tf.envelope_A = A;
    tf.odd_envelope_A = (shift == 0.0) ? 0.0 : 2.0 * A;
    tf.name = "sinc_sq(b=" + std::to_string(b) + ",shift=" + std::to_string(shift) + ")";
    return tf;
}

AnnihilationReport annihilation_residual(const CanonicalProduct& B, const TestFunction& f,
                                         size_t truncation, double tolerance,
                                         size_t derivative_budget) {
    if (B.zero_at_origin())
        throw validation_error("annihilation: B(0) must be nonzero");
    if (!(f.envelope_p >= 2.0))
        throw validation_error("annihilation: test function needs a declared decay envelope with p >= 2");
    const auto& zeros = B.positive_zeros();
    const size_t N = std::min(truncation, zeros.size());

    AnnihilationReport rep;
    rep.tolerance = tolerance;

    KahanSum acc;
    double bounded_mass = 0;
    size_t last_evaluated = 0;
    for (size_t k = 0; k < N; ++k) {
        const double x = zeros[k];
        const double df = f.f(x) - f.f(-x);
        if (df == 0.0) continue;
        if (rep.pairs_evaluated < static_cast<int>(derivative_budget)) {
            acc.add(df / B.derivative_at(x));  // B'(-x) = -B'(x) for even B
            last_evaluated = k;
            ++rep.pairs_evaluated;
        } else {
            bounded_mass += std::abs(df);
        }
    }
    rep.signed_sum = acc.value();
    rep.residual = std::abs(rep.signed_sum);

    // Floor of |B'| on the unevaluated outer range, estimated from probes
    // spread between the last evaluated pair and the truncation edge.
    double tail = 0;
    if ((bounded_mass > 0 || f.odd_envelope_A > 0) && N > 0) {
        double floor = std::numeric_limits<double>::infinity();
        const size_t from = std::min(N - 1, std::max(last_evaluated, N / 2));
        for (int q = 0; q < 8; ++q) {
            const size_t k = from + static_cast<size_t>(q) * (N - 1 - from) / 7;
            floor = std::min(floor, std::abs(B.derivative_at(zeros[k])));
        }
        if (!(floor > 0) || !std::isfinite(floor)) floor = 1e-300;
        tail = bounded_mass / floor;
        if (f.odd_envelope_A > 0) {
            const double xN = zeros[N - 1];
            const double gap = std::max(B.tail_gap(), 1e-9);
            tail += (f.odd_envelope_A / (floor * gap)) *
                    std::pow(1.0 + xN, 1.0 - f.envelope_p) / (f.envelope_p - 1.0);
        }
    }
    rep.tail_bound = tail;
    rep.annihilated = rep.residual + rep.tail_bound <= tolerance;
    return rep;
}

// ---- counting -------------------------------------------------------------------------

CountingProfile::CountingProfile(std::vector<double> points) {
    abs_sorted_.reserve(points.size());
    for (double p : points) abs_sorted_.push_back(std::abs(p));
    std::sort(abs_sorted_.begin(), abs_sorted_.end());
    // prefix values of N at each breakpoint >= 1
    N_prefix_.assign(abs_sorted_.size(), 0.0);
    double N = 0.0;
    double prev = 1.0;
    for (size_t i = 0; i < abs_sorted_.size(); ++i) {
        const double t = abs_sorted_[i];
        if (t > prev) {
            // count strictly below t (plus those below 1 already counted at t=1)
            const double n_before = static_cast<double>(
                std::lower_bound(abs_sorted_.begin(), abs_sorted_.end(), t) - abs_sorted_.begin());
            N += n_before * (std::log(t) - std::log(prev));
            prev = t;
        }
        N_prefix_[i] = N;
    }
}

int CountingProfile::n_at(double t) const {
    return static_cast<int>(std::upper_bound(abs_sorted_.begin(), abs_sorted_.end(), t) -
                            abs_sorted_.begin());
}

double CountingProfile::N_at(double R) const {
    if (R <= 1.0) return 0.0;
    // last breakpoint <= R that is >= 1
    auto it = std::upper_bound(abs_sorted_.begin(), abs_sorted_.end(), R);
    if (it == abs_sorted_.begin()) return 0.0;
    const size_t i = static_cast<size_t>(it - abs_sorted_.begin()) - 1;
    const double t = std::max(abs_sorted_[i], 1.0);
    return N_prefix_[i] + n_at(t) * (std::log(R) - std::log(t));
}

CountingProfile counting(std::span<const double> points) {
    return CountingProfile(std::vector<double>(points.begin(), points.end()));
}

// ---- exclusion ---------------------------------------------------------------------------

KreinExclusionReport krein_exclusion(std::span<const double> lambda, double c,
                                     std::span<const double> A_list, double R_max) {
    if (!(c > 0) || !(R_max > 4)) throw validation_error("krein_exclusion: need c > 0, R_max > 4");
    KreinExclusionReport rep;
    rep.certificate.statement = "krein-zero-set-exclusion";
    rep.certificate.anchor =
        "counting-function drift rules out containing the zero set of a type pi/c function";
    rep.certificate.direction = "predicate";
    rep.certificate.truncation_radius = R_max;
    rep.certificate.params = {{"c", c}, {"R_max", R_max}};

    const CountingProfile prof = counting(lambda);
    if (prof.abs_sorted().empty() || prof.abs_sorted().back() < R_max * 0.5)
        throw validation_error("krein_exclusion: point set does not cover [-R_max, R_max]");

    const double t0 = 2.0;
    const int n_pts = 512;
    std::vector<double> tg(n_pts);
    for (int i = 0; i < n_pts; ++i)
        tg[i] = t0 * std::pow(R_max / t0, static_cast<double>(i) / (n_pts - 1));

    // window means of n(t) - 2t/c over 8 log windows
    const int n_win = 8;
    rep.n_drift_means.assign(n_win, 0.0);
    std::vector<int> counts(n_win, 0);
    for (int i = 0; i < n_pts; ++i) {
        const int w = std::min(n_win - 1, i * n_win / n_pts);
        rep.n_drift_means[w] += prof.n_at(tg[i]) - 2.0 * tg[i] / c;
        ++counts[w];
    }
    for (int w = 0; w < n_win; ++w) rep.n_drift_means[w] /= std::max(1, counts[w]);
    rep.n_drift_ok = rep.n_drift_means[n_win - 1] < rep.n_drift_means[n_win - 2] &&
                     rep.n_drift_means[n_win - 2] < rep.n_drift_means[n_win - 3] &&
                     rep.n_drift_means[n_win - 1] <= rep.n_drift_means[0] - 1.0;

    // fit N(R) - 2R/c against log R for the extrapolated route
    {
        std::vector<double> us, ys;
        for (int i = 0; i < n_pts; ++i) {
            if (tg[i] < std::pow(R_max, 1.0 / 3.0)) continue;
            us.push_back(std::log(tg[i]));
            ys.push_back(prof.N_at(tg[i]) - 2.0 * tg[i] / c);
        }
        rep.nlog_fit = fit_quadratic(us, ys);
    }
    const double umax = std::log(R_max);
    const bool fit_certifies = rep.nlog_fit.c2 <= -0.05 &&
                               rep.nlog_fit.rms_residual <= std::abs(rep.nlog_fit.c2) * umax * umax / 4.0;

    bool all_A_ok = true;
    for (double A : A_list) {
        // direct: window means of N - 2R/c + A log R decreasing across the last three
        std::vector<double> means(n_win, 0.0);
        std::vector<int> cnts(n_win, 0);
        for (int i = 0; i < n_pts; ++i) {
            const int w = std::min(n_win - 1, i * n_win / n_pts);
            means[w] += prof.N_at(tg[i]) - 2.0 * tg[i] / c + A * std::log(tg[i]);
            ++cnts[w];
        }
        for (int w = 0; w < n_win; ++w) means[w] /= std::max(1, cnts[w]);
        const bool direct = means[n_win - 1] < means[n_win - 2] &&
                            means[n_win - 2] < means[n_win - 3];
        KreinExclusionReport::AEntry entry{A, false, "direct"};
        if (direct) {
            entry.ok = true;
        } else if (fit_certifies) {
            // negative log^2 coefficient dominates A log R for every fixed A
            entry.ok = true;
            entry.route = "extrapolated";
        }
        all_A_ok = all_A_ok && entry.ok;
        rep.a_entries.push_back(entry);
    }

    rep.certificate.verdict = (rep.n_drift_ok && all_A_ok) ? "holds" : "fails";
    rep.certificate.evidence["n_drift_means"] = rep.n_drift_means;
    rep.certificate.evidence["fit_c2"] = rep.nlog_fit.c2;
    rep.certificate.evidence["fit_rms"] = rep.nlog_fit.rms_residual;
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : rep.a_entries)
            arr.push_back({{"A", e.A}, {"ok", e.ok}, {"route", e.route}});
        rep.certificate.evidence["A_checks"] = arr;
    }
    return rep;
}

// ---- zero shifts -----------------------------------------------------------------------------

ShiftReport shift_zeros(const CanonicalProduct& B, const std::map<double, double>& targets,
                        double M, double delta) {
    if (!(delta > 0)) throw validation_error("shift_zeros: delta must be positive");
    const double k1 = 3.0 * std::exp(delta);

    std::vector<double> shifted;
    std::vector<std::pair<double, double>> moved;  // (lambda, zeta), zeta != lambda
    for (double x : B.positive_zeros()) {
        if (x <= M) continue;
        double zeta = x;
        auto it = targets.find(x);
        if (it != targets.end()) zeta = it->second;
        const double window = k1 * std::exp(-delta * x);
        if (std::abs(zeta - x) > window)
            throw validation_error("shift_zeros: target for zero at " + std::to_string(x) +
                                   " leaves its interval");
        if (!(zeta > 0)) throw validation_error("shift_zeros: shifted zero must stay positive");
        shifted.push_back(zeta);
        if (zeta != x) moved.emplace_back(x, zeta);
    }
    std::sort(shifted.begin(), shifted.end());
    for (size_t i = 1; i < shifted.size(); ++i)
        if (!(shifted[i] > shifted[i - 1]))
            throw validation_error("shift_zeros: targets break the zero ordering");

    ShiftReport rep{CanonicalProduct(std::move(shifted), false, 1.0, B.nominal_type()),
                    0.0, 0.0, {}};

    // ratio bound on sampled disc boundaries
    std::vector<double> fit_x, fit_y;
    size_t step = std::max<size_t>(1, moved.size() / 64);
    for (size_t i = 0; i < moved.size(); i += step) {
        const auto [lam, zeta] = moved[i];
        const double r = std::exp(-delta * lam / 3.0);
        double dev = 0;
        for (int q = 0; q < 8; ++q) {
            const double th = 2.0 * std::numbers::pi * q / 8.0;
            const std::complex<double> z = lam + std::polar(r, th);
            const std::complex<double> ratio =
                (1.0 - z / zeta) / (1.0 - z / lam) - 1.0;
            dev = std::max(dev, std::abs(ratio));
        }
        rep.max_ratio_deviation = std::max(rep.max_ratio_deviation, dev);
        rep.max_deviation_coeff =
            std::max(rep.max_deviation_coeff, dev * std::exp(2.0 * delta * lam / 3.0));
        if (dev > 0) {
            fit_x.push_back(lam);
            fit_y.push_back(std::log(dev));
        }
    }
    if (fit_x.size() >= 2) rep.decay_fit = fit_line(fit_x, fit_y);
    return rep;
}

// ---- real-axis bounds ------------------------------------------------------------------------

LfBoundsReport lf_bounds_check(const CanonicalProduct& B, double delta,
                               std::span<const double> x_grid) {
    LfBoundsReport rep;
    rep.worst_margin.reserve(x_grid.size());

    const auto triple = [&](double x) {
        const double b0 = std::abs(B.eval(x, B.zero_count()).value().real());
        const double b1 = std::abs(B.derivative_real(x));
        const double h = 1e-5 * std::max(1.0, std::abs(x));
        const double b2 =
            std::abs((B.derivative_real(x + h) - B.derivative_real(x - h)) / (2.0 * h));
        return b0 + b1 + b2;
    };

    std::vector<std::pair<double, bool>> oks;  // (|x|, bound holds)
    for (double x : x_grid) {
        const double lhs = triple(x);
        const double rhs = std::exp(delta * std::abs(x) / 5.0);
        rep.worst_margin.push_back(rhs - lhs);
        oks.emplace_back(std::abs(x), lhs < rhs);
    }
    std::sort(oks.begin(), oks.end());
    // smallest radius beyond which the bound holds for every tested point
    double threshold = 0;
    bool any_fail = false;
    for (auto it = oks.rbegin(); it != oks.rend(); ++it) {
        if (!it->second) {
            threshold = it->first;
            any_fail = true;
            break;
        }
    }
    if (!any_fail)
        rep.threshold_C = 0.0;
    else if (threshold < oks.back().first)
        rep.threshold_C = threshold;

    const auto zeros = B.all_zeros();
    double min_coeff = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < zeros.size(); ++i) {
        const double gap = zeros[i] - zeros[i - 1];
        const double lam = std::min(std::abs(zeros[i]), std::abs(zeros[i - 1]));
        min_coeff = std::min(min_coeff, gap * std::exp(delta * lam / 4.0));
    }
    rep.min_gap_coeff = min_coeff;
    return rep;
}

// ---- node systems -----------------------------------------------------------------------------

void NodeSystem::validate() const {
    for (size_t k = 0; k < quads.size(); ++k) {
        const auto& q = quads[k];
        const double base = 2.0 * static_cast<double>(k);
        if (!(base + 1.2 < q.a && q.a < q.b && q.b < base + 1.4))
            throw validation_error("node system: (a, b) outside its interval at k = " + std::to_string(k));
        if (!(base + 1.6 < q.c && q.c < q.d && q.d < base + 1.8))
            throw validation_error("node system: (c, d) outside its interval at k = " + std::to_string(k));
        if ((q.b - q.a) != (q.d - q.c) || (q.b - q.a) != q.eta)
            throw validation_error("node system: gap identity fails at k = " + std::to_string(k));
        const double sum = (q.a + q.b) + (q.c + q.d);
        if (sum != 8.0 * static_cast<double>(k) + 6.0)
            throw validation_error("node system: sum identity fails at k = " + std::to_string(k));
    }
}

namespace {

NodeQuad place_quad(int k, double eta) {
    if (!(eta > 0) || eta > 0.1)
        throw validation_error("build_four_node_system: eta must lie in (0, 1/10] at k = " + std::to_string(k));
    const double mid1 = 2.0 * k + 1.3125;  // 21/16, dyadic
    const double mid2 = 2.0 * k + 1.6875;  // 27/16, dyadic
    // snap the half-gap to the binade grid so all four placements are exact
    const double u = std::exp2(std::ilogb(mid2) - 52);
    const double s = std::round((eta / 2.0) / u) * u;
    if (!(s > 0))
        throw validation_error("build_four_node_system: eta below floating-point resolution at k = " +
                               std::to_string(k));
    NodeQuad q;
    q.a = mid1 - s;
    q.b = mid1 + s;
    q.c = mid2 - s;
    q.d = mid2 + s;
    q.eta = q.b - q.a;  // == 2s exactly
    return q;
}

} // namespace

FourNodeResult build_four_node_system(const std::function<double(int)>& eta_rule, int K_max) {
    if (K_max < 0) throw validation_error("build_four_node_system: K_max >= 0");
    NodeSystem nodes;
    std::vector<double> zeros;
    for (int k = 0; k <= K_max; ++k) {
        const NodeQuad q = place_quad(k, eta_rule(k));
        nodes.quads.push_back(q);
        zeros.push_back(q.a);
        zeros.push_back(q.b);
        zeros.push_back(q.c);
        zeros.push_back(q.d);
    }
    nodes.validate();

    // Derivative floors are measured on a doubled-range build so every
    // reported index sees the same relative continuation geometry; the
    // returned product itself stops at K_max.
    const int K_pad = 2 * K_max + 32;
    std::vector<double> padded = zeros;
    for (int k = K_max + 1; k <= K_pad; ++k) {
        const NodeQuad q = place_quad(k, std::min(0.1, eta_rule(K_max)));
        padded.push_back(q.a);
        padded.push_back(q.b);
        padded.push_back(q.c);
        padded.push_back(q.d);
    }
    const CanonicalProduct G_eval(std::move(padded), true, 1.0, 2.0 * std::numbers::pi);

    FourNodeResult res{std::move(nodes),
                  CanonicalProduct(std::move(zeros), true, 1.0, 2.0 * std::numbers::pi),
                  std::numeric_limits<double>::infinity(),
                  {}};
    for (int k = 0; k <= K_max; ++k) {
        const auto& q = res.nodes.quads[static_cast<size_t>(k)];
        double m = std::numeric_limits<double>::infinity();
        for (double lam : {q.a, q.b, q.c, q.d})
            m = std::min(m, (1.0 + lam) * std::abs(G_eval.derivative_at(lam)) / q.eta);
        res.per_k_ratio.push_back(m);
        res.min_derivative_ratio = std::min(res.min_derivative_ratio, m);
    }
    return res;
}

} // namespace typelab
