#ifndef TYPELAB_WEIGHTS_HPP
#define TYPELAB_WEIGHTS_HPP

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "typelab/measure.hpp"
#include "typelab/trend.hpp"

namespace typelab {

// Extended-real weight on R.  The power shift W_t(x) = W(x)(1+|x|)^{-t} is
// carried as an accumulated exponent so (W_t)_s == W_{t+s} exactly.
class Weight {
public:
    using Fn = std::function<double(double)>;

    explicit Weight(Fn f, double shift = 0.0);

    static Weight constant(double c);
    static Weight power(double exponent);  // (1+|x|)^exponent
    // Sampled weight; +infinity outside the grid when infinity_outside is set,
    // otherwise clamped to the edge values.
    static Weight from_samples(std::vector<double> grid, std::vector<double> values,
                               bool infinity_outside);
    // Finite only on the listed support points.
    static Weight discrete(std::vector<double> support, Fn on_support);

    double operator()(double x) const;
    Weight shifted(double t) const;
    double shift() const { return shift_; }
    const std::optional<std::vector<double>>& finite_support() const { return support_; }

private:
    Fn base_;
    double shift_ = 0;
    std::optional<std::vector<double>> support_;  // sorted, when discretely supported
};

// Grid trend for the defining growth condition: for some s on the grid,
// (1+|x|)^s W(x) grows without bound along |x|.
struct WeightGrowthReport {
    std::optional<double> witness_s;
    bool holds = false;
};
WeightGrowthReport check_weight_growth(const Weight& W, std::span<const double> s_grid,
                                       std::span<const double> x_grid);

struct SeminormResult {
    double value = 0;
    double argmax = 0;
};

// sup over the grid of |f| / W, with the maximizing point.
SeminormResult c0_seminorm(const std::function<double(double)>& f, const Weight& W,
                           std::span<const double> grid);

// ---- constructive weight transform ---------------------------------------

struct WeightTransformResult {
    std::vector<double> grid;
    std::vector<double> values;           // W on the grid
    Weight weight;                        // sampled evaluator of the result
    std::vector<double> l2_partials;      // partial ||W||_{L^2(mu)}^2 when mu given
    Trend l2_trend = Trend::inconclusive;
};

// W(x) = min( inf over k1*I_x of W~_p , e^{delta|x|/3} ), with k1 = 3 e^delta.
// Continuous inputs: the infimum runs over grid samples with a one-sample
// inward bias, so it over-approximates the true infimum (conservative).
// Discretely supported inputs: the infimum runs over the exact support points.
WeightTransformResult weight_transform(const Weight& W_tilde, double delta, double p,
                                       std::span<const double> grid,
                                       const SpectralMeasure* mu = nullptr);

// ---- Bakan-style weight ----------------------------------------------------

struct BakanApproximant {
    std::function<std::complex<double>(double)> h;
    double claimed_residual;  // caller-reported L^2(mu_{2k}) residual tag
};

struct BakanWeightResult {
    Weight weight;
    // seminorm of h_k - f/(x-i) in W_s for each requested s and k >= s
    struct ChainEntry {
        double s;
        int k;
        double seminorm;
        bool within_bound;  // <= 2^{-k}
    };
    std::vector<ChainEntry> chain;
};

BakanWeightResult bakan_weight(const std::function<std::complex<double>(double)>& f,
                               const std::vector<BakanApproximant>& h, int n, int K,
                               std::span<const double> grid,
                               std::span<const double> s_values);

} // namespace typelab

#endif
