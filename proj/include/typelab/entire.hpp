#ifndef TYPELAB_ENTIRE_HPP
#define TYPELAB_ENTIRE_HPP

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "typelab/certificate.hpp"
#include "typelab/measure.hpp"
#include "typelab/numeric.hpp"
#include "typelab/trend.hpp"
#include "typelab/weights.hpp"

namespace typelab {

enum class TailPolicy { none, pair_log_bound };

struct ProductValue {
    double log_abs = 0;                      // log |F(z)| after tail correction
    std::complex<double> phase = 1.0;        // unit modulus; +-1 for real z
    double tail_log_bound = 0;               // bound on the residual log error
    bool at_zero = false;
    double zero_position = 0;

    std::complex<double> value() const;      // exp(log_abs) * phase
};

// Parameters of the arithmetic continuation of a stored zero sequence:
// zeros past the last stored one are modeled at x_N + j * d.
struct ProductTailModel {
    double c = 0;  // 1 + x_N / d
    double d = 0;  // persisting gap
    bool valid = false;
};

// Symmetric canonical product F(z) = c * prod_k (1 - z^2/x_k^2), times z when
// a zero sits at the origin.  Products are evaluated in the log domain with
// compensated summation; the pair_log_bound policy additionally applies the
// arithmetic-continuation tail (a log-Gamma second difference) and reports a
// bound on the residual model error.
class CanonicalProduct {
public:
    CanonicalProduct() : CanonicalProduct({}, false, 1.0, 0.0) {}
    CanonicalProduct(std::vector<double> positive_zeros, bool zero_at_origin,
                     double normalization, double nominal_type);

    static CanonicalProduct sinc_pi(int K);   // zeros at 1..K: sin(pi z)/(pi z)
    static CanonicalProduct sin_pi(int K);    // zeros at 0, +-1..K: sin(pi z)
    static CanonicalProduct cos_pi(int K);    // zeros at +-(k - 1/2): cos(pi z)

    const std::vector<double>& positive_zeros() const { return positive_zeros_; }
    bool zero_at_origin() const { return zero_at_origin_; }
    double normalization() const { return normalization_; }
    double nominal_type() const { return nominal_type_; }
    size_t zero_count() const { return positive_zeros_.size(); }

    // All zeros (negative, origin if present, positive), ascending.
    std::vector<double> all_zeros() const;

    ProductValue eval(std::complex<double> z, size_t truncation,
                      TailPolicy policy = TailPolicy::pair_log_bound) const;

    // F'(zero) for zero in {0} u {+-x_k}; computed from the product over the
    // remaining zeros, cached per positive zero.
    double derivative_at(double zero) const;

    // Real-axis derivative away from zeros, via the logarithmic derivative.
    double derivative_real(double x) const;

    // mean gap of the last stored zeros; used by tail estimates
    double tail_gap() const;

private:
    ProductTailModel tail_model() const;
    double gap_spread() const;
    double tail_bar(std::complex<double> z, bool real_input) const;
    double log_derivative_mag(size_t j) const;  // log |F'(x_j)| with sign cached

    std::vector<double> positive_zeros_;
    bool zero_at_origin_;
    double normalization_;
    double nominal_type_;
    mutable std::vector<double> deriv_cache_;       // signed F'(x_j), NaN when unset
};

// ---- Krein sums -------------------------------------------------------------

struct KreinSumReport {
    std::vector<double> window_radii;
    std::vector<double> partials;       // sum of W(l)/|F'(l)| over |l| <= R
    Trend trend = Trend::inconclusive;
    Certificate certificate;            // eq-style summability verdict
    // absolute-convergence diagnostic: smallest N with converged trend of
    // sum 1/(|F'(l)| |l|^{N+1}), if any on the scanned range
    std::optional<int> abs_convergence_N;
};

KreinSumReport krein_sum(const CanonicalProduct& F, const Weight& W);

// ---- annihilation -----------------------------------------------------------

// Test function with a declared type and decay envelope |f(x)| <= A(1+|x|)^-p.
// odd_envelope_A bounds |f(x) - f(-x)| the same way; it is what controls the
// symmetric pair sums, and is 0 for even functions.
struct TestFunction {
    std::function<double(double)> f;
    double exponential_type = 0;
    double envelope_A = 0;
    double envelope_p = 0;
    double odd_envelope_A = 0;
    std::string name;
};

// (sin(b z)/(b z))^2 shifted by c: type 2b, decay (1/b^2) x^-2.
TestFunction sinc_sq(double b, double shift = 0.0);

struct AnnihilationReport {
    double signed_sum = 0;     // sum over zeros of f(l)/B'(l), paired symmetric form
    double residual = 0;       // |signed_sum|
    double tail_bound = 0;     // envelope bound on the omitted pairs
    int pairs_evaluated = 0;
    bool annihilated = false;  // residual + tail <= tolerance
    double tolerance = 0;
};

// The sum runs over symmetric pairs (f(l) - f(-l))/B'(l), which is exact for
// the stored symmetric zero set; pairs beyond `derivative_budget` are bounded
// through the declared odd envelope and the derivative floor of the evaluated
// range.
AnnihilationReport annihilation_residual(const CanonicalProduct& B, const TestFunction& f,
                                         size_t truncation, double tolerance = 1e-6,
                                         size_t derivative_budget = 2000);

// ---- counting ---------------------------------------------------------------

class CountingProfile {
public:
    explicit CountingProfile(std::vector<double> points);  // atom positions

    int n_at(double t) const;          // #{|p| <= t}, exact
    double N_at(double R) const;       // int_1^R n(t)/t dt, exact step integral
    const std::vector<double>& abs_sorted() const { return abs_sorted_; }

private:
    std::vector<double> abs_sorted_;
    std::vector<double> N_prefix_;     // N at each |p| breakpoint >= 1
};

CountingProfile counting(std::span<const double> points);

// ---- exclusion --------------------------------------------------------------

struct KreinExclusionReport {
    Certificate certificate;
    // window means of n(t) - 2t/c over the log grid
    std::vector<double> n_drift_means;
    bool n_drift_ok = false;
    struct AEntry {
        double A;
        bool ok;
        std::string route;  // "direct" or "extrapolated"
    };
    std::vector<AEntry> a_entries;
    QuadraticFit nlog_fit;  // N(R) - 2R/c fitted against log R
};

// Desk-scale form of the zero-set exclusion test: n(t) - 2t/c must drift down
// without bound, and N(R) - 2R/c + A log R must be eventually decreasing for
// every A in the list.  When the direct window check cannot see the decrease
// at this radius, a quadratic-in-log-R fit of N - 2R/c with significantly
// negative leading coefficient certifies the limit instead; the route taken
// is recorded per A.
KreinExclusionReport krein_exclusion(std::span<const double> lambda, double c,
                                     std::span<const double> A_list, double R_max);

// ---- zero shifts -------------------------------------------------------------

struct ShiftReport {
    CanonicalProduct shifted;          // product over the shifted zeros, |l| > M
    double max_ratio_deviation = 0;    // max over sampled disc boundaries of |(1-z/zeta)(1-z/l)^{-1} - 1|
    double max_deviation_coeff = 0;    // deviation * e^{2 delta |l| / 3}
    LineFit decay_fit;                 // log deviation vs |l|
};

// Targets map original positive zeros to shifted positions; each target must
// lie in k1 * I_lambda with k1 = 3 e^delta, and py symmetric products shift
// symmetrically.  Zeros with |l| <= M are dropped.
ShiftReport shift_zeros(const CanonicalProduct& B,
                        const std::map<double, double>& targets, double M, double delta);

// ---- real-axis bounds (growth and separation) --------------------------------

struct LfBoundsReport {
    std::optional<double> threshold_C;  // smallest grid |x| beyond which |B|+|B'|+|B''| < e^{delta|x|/5}
    double min_gap_coeff = 0;           // min over consecutive zeros of gap * e^{delta |l| / 4}
    std::vector<double> worst_margin;   // per grid point: e^{delta|x|/5} - (|B|+|B'|+|B''|)
};

LfBoundsReport lf_bounds_check(const CanonicalProduct& B, double delta,
                               std::span<const double> x_grid);

// ---- four-node systems --------------------------------------------------------

struct NodeQuad {
    double a, b, c, d;
    double eta;  // stored gap, bitwise equal to b-a and d-c
};

struct NodeSystem {
    std::vector<NodeQuad> quads;
    // exact identity checks; throws on violation
    void validate() const;
};

struct FourNodeResult {
    NodeSystem nodes;
    CanonicalProduct G;
    // min over k <= K of min over the four nodes of (1+|l|) |G'(l)| / eta_k.
    // The (1+|l|) factor is what the product's own sin^2-based factorization
    // supports as a uniform floor (G carries a single zero at the origin, so
    // the bare derivative decays like 1/l along the nodes); it also matches
    // the envelope the annihilator argument consumes.
    double min_derivative_ratio;
    std::vector<double> per_k_ratio;
};

// Places the four nodes per index symmetrically about dyadic midpoints
// 2k + 21/16 and 2k + 27/16, so the gap and sum identities hold bitwise,
// builds G over the symmetric node set with a zero at the origin, and reports
// the derivative floor ratio measured on a doubled-range continuation build.
FourNodeResult build_four_node_system(const std::function<double(int)>& eta_rule, int K_max);

} // namespace typelab

#endif
