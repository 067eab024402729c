#include "typelab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "typelab/errors.hpp"
#include "typelab/numeric.hpp"

namespace typelab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Weight::Weight(Fn f, double shift) : base_(std::move(f)), shift_(shift) {
    if (!base_) throw validation_error("weight: empty evaluator");
}

Weight Weight::constant(double c) {
    if (!(c > 0)) throw validation_error("weight: constant must be positive");
    return Weight([c](double) { return c; });
}

Weight Weight::power(double exponent) {
    return Weight([exponent](double x) { return std::pow(1.0 + std::abs(x), exponent); });
}

Weight Weight::from_samples(std::vector<double> grid, std::vector<double> values,
                            bool infinity_outside) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw validation_error("weight: samples need matching grid/values, >= 2 nodes");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw validation_error("weight: sample grid not increasing");
    auto g = std::make_shared<std::vector<double>>(std::move(grid));
    auto v = std::make_shared<std::vector<double>>(std::move(values));
    return Weight([g, v, infinity_outside](double x) {
        if (x < g->front() || x > g->back()) return infinity_outside ? kInf : 0.0;
        auto it = std::upper_bound(g->begin(), g->end(), x);
        if (it == g->begin()) return v->front();
        if (it == g->end()) return v->back();
        const size_t i = static_cast<size_t>(it - g->begin());
        const double t = (x - (*g)[i - 1]) / ((*g)[i] - (*g)[i - 1]);
        return (*v)[i - 1] + t * ((*v)[i] - (*v)[i - 1]);
    });
}

Weight Weight::discrete(std::vector<double> support, Fn on_support) {
    std::sort(support.begin(), support.end());
    auto sup = std::make_shared<std::vector<double>>(std::move(support));
    auto f = std::make_shared<Fn>(std::move(on_support));
    Weight w([sup, f](double x) {
        auto it = std::lower_bound(sup->begin(), sup->end(), x);
        if (it != sup->end() && *it == x) return (*f)(x);
        return kInf;
    });
    w.support_ = *sup;
    return w;
}

double Weight::operator()(double x) const {
    const double b = base_(x);
    if (b == kInf) return kInf;
    if (shift_ == 0.0) return b;
    return b * std::pow(1.0 + std::abs(x), -shift_);
}

Weight Weight::shifted(double t) const {
    Weight w(base_, shift_ + t);
    w.support_ = support_;
    return w;
}

WeightGrowthReport check_weight_growth(const Weight& W, std::span<const double> s_grid,
                                       std::span<const double> x_grid) {
    WeightGrowthReport rep;
    std::vector<std::pair<double, double>> by_abs;  // (|x|, x)
    for (double x : x_grid) by_abs.emplace_back(std::abs(x), x);
    std::sort(by_abs.begin(), by_abs.end());
    for (double s : s_grid) {
        // window minima of (1+|x|)^s W(x) must be increasing in |x|
        std::vector<double> vals;
        for (const auto& [ax, x] : by_abs) {
            const double w = W(x);
            if (w == kInf) continue;
            vals.push_back(std::pow(1.0 + ax, s) * w);
        }
        if (vals.size() < 8) continue;
        const size_t q = vals.size() / 4;
        double m0 = kInf, m3 = kInf;
        for (size_t i = 0; i < q; ++i) m0 = std::min(m0, vals[i]);
        for (size_t i = vals.size() - q; i < vals.size(); ++i) m3 = std::min(m3, vals[i]);
        if (m3 > 4.0 * m0 || m3 == kInf) {
            rep.witness_s = s;
            rep.holds = true;
            break;
        }
    }
    return rep;
}

SeminormResult c0_seminorm(const std::function<double(double)>& f, const Weight& W,
                           std::span<const double> grid) {
    if (grid.empty()) throw validation_error("seminorm: empty grid");
    SeminormResult r{0.0, grid.front()};
    for (double x : grid) {
        const double w = W(x);
        if (w == 0.0) throw validation_error("seminorm: weight vanishes at x = " + std::to_string(x));
        if (w == kInf) continue;
        const double v = std::abs(f(x)) / w;
        if (v > r.value) {
            r.value = v;
            r.argmax = x;
        }
    }
    return r;
}

WeightTransformResult weight_transform(const Weight& W_tilde, double delta, double p,
                                       std::span<const double> grid,
                                       const SpectralMeasure* mu) {
    if (!(delta > 0) || p < 0) throw validation_error("weight_transform: delta > 0, p >= 0");
    if (grid.size() < 4) throw validation_error("weight_transform: grid too small");
    const double k1 = 3.0 * std::exp(delta);
    const Weight Wp = W_tilde.shifted(p);

    WeightTransformResult res{{}, {}, Weight::constant(1.0), {}, Trend::inconclusive};
    res.grid.assign(grid.begin(), grid.end());
    res.values.reserve(grid.size());

    const auto& support = W_tilde.finite_support();
    for (double x : grid) {
        const double h = k1 * std::exp(-delta * std::abs(x));
        const double cap = std::exp(delta * std::abs(x) / 3.0);
        double inf = kInf;
        if (support) {
            auto lo = std::lower_bound(support->begin(), support->end(), x - h);
            for (auto it = lo; it != support->end() && *it <= x + h; ++it)
                inf = std::min(inf, Wp(*it));
        } else {
            auto lo = std::lower_bound(grid.begin(), grid.end(), x - h);
            auto hi = std::upper_bound(grid.begin(), grid.end(), x + h);
            const auto count = hi - lo;
            if (count < 3)
                throw grid_error("weight_transform: window at x = " + std::to_string(x) +
                                 " holds fewer than 3 samples");
            ++lo;  // one-sample inward bias at both ends
            --hi;
            for (auto it = lo; it != hi; ++it) inf = std::min(inf, Wp(*it));
        }
        res.values.push_back(std::min(inf, cap));
    }
    res.weight = Weight::from_samples(res.grid, res.values, true);

    if (mu) {
        // partial L^2(mu) norms of W over doubling windows
        const double R = mu->truncation_radius();
        const auto windows = geometric_windows(std::max(1.0, R / 64.0), 2.0, 7);
        const Weight& Wres = res.weight;
        for (double w : windows) {
            const double val = mu->sum_atoms([&](const Atom& a) {
                if (std::abs(a.position) > w) return 0.0;
                const double W_at = Wres(a.position);
                return W_at == kInf ? 0.0 : a.mass * W_at * W_at;
            });
            res.l2_partials.push_back(val);
        }
        res.l2_trend = classify_partials(res.l2_partials);
    }
    return res;
}

BakanWeightResult bakan_weight(const std::function<std::complex<double>(double)>& f,
                               const std::vector<BakanApproximant>& h, int n, int K,
                               std::span<const double> grid,
                               std::span<const double> s_values) {
    if (K < 0 || K > static_cast<int>(h.size()))
        throw validation_error("bakan_weight: K must index the supplied approximants");
    if (K == 0 && n < 1) throw validation_error("bakan_weight: K = 0 needs n >= 1");

    const auto diff_abs2 = [f, h](int k, double x) {
        const std::complex<double> target = f(x) / std::complex<double>(x, -1.0);
        const std::complex<double> d = h[static_cast<size_t>(k - 1)].h(x) - target;
        return std::norm(d);
    };

    auto hcopy = h;
    Weight W([f, hcopy, n, K](double x) {
        KahanSum acc;
        acc.add(1.0 / (1.0 + std::pow(std::abs(x), n)));
        const std::complex<double> target = f(x) / std::complex<double>(x, -1.0);
        for (int k = 1; k <= K; ++k) {
            const std::complex<double> d = hcopy[static_cast<size_t>(k - 1)].h(x) - target;
            acc.add(std::pow(4.0, k) * std::norm(d) * std::pow(1.0 + std::abs(x), 2.0 * k));
        }
        return std::sqrt(acc.value());
    });

    BakanWeightResult res{W, {}};
    for (double s : s_values) {
        for (int k = std::max(1, static_cast<int>(std::ceil(s))); k <= K; ++k) {
            double sup = 0;
            for (double x : grid) {
                const double w = W(x);
                if (!(w > 0) || w == std::numeric_limits<double>::infinity()) continue;
                const double v = std::sqrt(diff_abs2(k, x)) * std::pow(1.0 + std::abs(x), s) / w;
                sup = std::max(sup, v);
            }
            res.chain.push_back({s, k, sup, sup <= std::pow(2.0, -k) * (1.0 + 1e-12)});
        }
    }
    return res;
}

} // namespace typelab
