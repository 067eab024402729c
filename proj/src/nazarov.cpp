#include "typelab/nazarov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "typelab/errors.hpp"
#include "typelab/numeric.hpp"

namespace typelab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double binom(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}
} // namespace

// ---- GammaDiffeo ---------------------------------------------------------

GammaDiffeo::GammaDiffeo(Family fam, double beta, std::function<double(double)> x,
                         std::function<double(double)> dx)
    : family_(fam), beta_(beta), x_(std::move(x)), dx_(std::move(dx)) {}

GammaDiffeo GammaDiffeo::identity() {
    return GammaDiffeo(Family::identity, 0.0, [](double t) { return t; },
                       [](double) { return 1.0; });
}

GammaDiffeo GammaDiffeo::arctan_shift(double beta) {
    if (!(beta > -1))
        throw validation_error("arctan_shift: beta > -1 keeps X strictly increasing");
    return GammaDiffeo(Family::arctan_shift, beta,
                       [beta](double t) { return t + beta * std::atan(t); },
                       [beta](double t) { return 1.0 + beta / (1.0 + t * t); });
}

GammaDiffeo GammaDiffeo::custom(std::function<double(double)> x,
                                std::function<double(double)> dx) {
    return GammaDiffeo(Family::custom, 0.0, std::move(x), std::move(dx));
}

GammaDiffeo GammaDiffeo::arcsinh_shift(double beta) {
    if (!(beta > -1))
        throw validation_error("arcsinh_shift: beta > -1 keeps X strictly increasing");
    return GammaDiffeo(Family::arcsinh_shift, beta,
                       [beta](double t) { return t + beta * std::asinh(t); },
                       [beta](double t) { return 1.0 + beta / std::sqrt(1.0 + t * t); });
}

std::string GammaDiffeo::family_name() const {
    switch (family_) {
        case Family::identity: return "identity";
        case Family::arctan_shift: return "arctan_shift";
        case Family::arcsinh_shift: return "arcsinh_shift";
        default: return "custom";
    }
}

double GammaDiffeo::higher_derivative(int k, double t) const {
    if (k < 2) throw validation_error("higher_derivative: k >= 2");
    const int m = k - 1;  // difference order applied to X'
    const double h = 0.05 * std::max(std::abs(t), 20.0);
    KahanSum acc;
    for (int j = 0; j <= m; ++j) {
        const double off = (0.5 * m - j) * h;
        acc.add(((j % 2) ? -1.0 : 1.0) * binom(m, j) * dx_(t + off));
    }
    return acc.value() / std::pow(h, m);
}

double GammaDiffeo::inverse(double y) const {
    double lo = y - 1, hi = y + 1;
    while (x_(lo) > y) lo = y - 2 * (y - lo) - 1;
    while (x_(hi) < y) hi = y + 2 * (hi - y) + 1;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (x_(mid) < y ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        const double d = dx_(t);
        if (d > 0) t -= (x_(t) - y) / d;
    }
    return t;
}

// ---- gamma_check ------------------------------------------------------------

GammaCheckReport gamma_check(const GammaDiffeo& X, std::span<const double> t_grid,
                             int k_max) {
    if (t_grid.size() < 16) throw validation_error("gamma_check: grid too small");
    GammaCheckReport rep;
    rep.certificate.statement = "gamma-class-membership";
    rep.certificate.anchor = "derivative tends to one and higher derivatives decay polynomially";
    rep.certificate.direction = "predicate";
    rep.certificate.truncation_radius = std::abs(t_grid.back());
    rep.certificate.params = {{"family", X.family_name()}, {"beta", X.beta()}, {"k_max", k_max}};

    for (size_t i = 1; i < t_grid.size(); ++i)
        if (!(X(t_grid[i]) > X(t_grid[i - 1])))
            throw validation_error("gamma_check: X is not increasing on the grid");

    const double t_max = std::abs(t_grid.back());
    double gap = 0;
    for (double t : t_grid)
        if (std::abs(t) >= 0.1 * t_max) gap = std::max(gap, std::abs(X.derivative(t) - 1.0));
    rep.derivative_limit_gap = gap;

    // window means of |X' - 1| along |t|
    std::vector<double> absg;
    for (double t : t_grid)
        if (t > 0) absg.push_back(std::abs(X.derivative(t) - 1.0));
    bool limit_ok = gap <= 1e-9;
    if (!limit_ok && absg.size() >= 8) {
        const size_t q = absg.size() / 4;
        double m0 = 0, m3 = 0;
        for (size_t i = 0; i < q; ++i) m0 += absg[i];
        for (size_t i = absg.size() - q; i < absg.size(); ++i) m3 += absg[i];
        m0 /= q;
        m3 /= q;
        limit_ok = gap <= 0.05 && m3 <= 0.5 * m0;
    }

    // decay exponent fits on the positive half, t in [10, t_max]
    bool decay_ok = true;
    for (int k = 2; k <= k_max; ++k) {
        std::vector<double> lx, ly;
        double maxmag = 0;
        for (int i = 0; i < 24; ++i) {
            const double t = 10.0 * std::pow(t_max / 10.0, i / 23.0);
            const double v = std::abs(X.higher_derivative(k, t));
            maxmag = std::max(maxmag, v);
            if (v > 1e-300) {
                lx.push_back(std::log(t));
                ly.push_back(std::log(v));
            }
        }
        if (maxmag < 1e-12) {
            rep.fitted_decay.push_back(99.0);  // identically zero tail
            continue;
        }
        if (lx.size() < 4) {
            decay_ok = false;
            rep.fitted_decay.push_back(0.0);
            continue;
        }
        const LineFit f = fit_line(lx, ly);
        rep.fitted_decay.push_back(-f.slope);
    }
    for (size_t i = 0; i < rep.fitted_decay.size(); ++i) {
        if (!(rep.fitted_decay[i] > 0)) decay_ok = false;
        if (i && !(rep.fitted_decay[i] > rep.fitted_decay[i - 1] - 0.2)) decay_ok = false;
    }

    rep.certificate.verdict = (limit_ok && decay_ok) ? "holds" : "fails";
    rep.certificate.evidence["derivative_limit_gap"] = gap;
    rep.certificate.evidence["fitted_decay"] = rep.fitted_decay;
    return rep;
}

// ---- measure construction ------------------------------------------------------

SpectralMeasure build_measure(const GammaDiffeo& X, double c, int K) {
    if (!(c > 0) || K < 0) throw validation_error("build_measure: c > 0, K >= 0");
    std::vector<Atom> atoms;
    atoms.reserve(2 * K + 1);
    for (int k = -K; k <= K; ++k) atoms.push_back({X(c * k), X.derivative(c * k)});
    return SpectralMeasure(std::move(atoms), std::nullopt, {}, true,
                           std::abs(X(c * K)) + 1.0);
}

// ---- SchwartzWindow ----------------------------------------------------------------

SchwartzWindow::SchwartzWindow(double inner_a, double outer_b) : a_(inner_a), b_(outer_b) {
    if (!(0 < a_ && a_ < b_)) throw validation_error("window: need 0 < a < b");

    // time profile on [0, 300] with 2^18 samples, filled via one FFT of the
    // sampled transform; trapezoid aliases land beyond twice the stored range
    const size_t half_n = 1u << 18;
    const size_t fft_n = 1u << 20;
    const double x_max = 300.0;
    grid_step_ = x_max / static_cast<double>(half_n);
    const double dxi = kTwoPi / (static_cast<double>(fft_n) * grid_step_);
    if (b_ >= 0.25 * kTwoPi / grid_step_)
        throw validation_error("window: outer radius too large for the fixed time grid");

    std::vector<std::complex<double>> buf(fft_n, {0.0, 0.0});
    buf[0] = 0.5 * transform(0.0);
    for (size_t m = 1; m < fft_n; ++m) {
        const double xi = dxi * static_cast<double>(m);
        if (xi >= b_) break;
        buf[m] = transform(xi);
    }
    fft_radix2(buf, -1);

    const double scale = dxi / (2.0 * std::numbers::pi * std::numbers::pi);
    samples_ = std::make_shared<std::vector<double>>(half_n);
    double peak = 0;
    for (size_t j = 0; j < half_n; ++j) {
        (*samples_)[j] = scale * buf[j].real();
        peak = std::max(peak, std::abs((*samples_)[j]));
    }
    // envelope cutoff: beyond it the profile is treated as zero
    size_t last = 0;
    const double floor_level = 1e-17 * peak;
    for (size_t j = 0; j < half_n; ++j)
        if (std::abs((*samples_)[j]) > floor_level) last = j;
    cutoff_ = grid_step_ * static_cast<double>(std::min(half_n - 4, last + 8));
}

double SchwartzWindow::transform(double xi) const {
    const double axi = std::abs(xi);
    if (axi <= a_) return 1.0;
    if (axi >= b_) return 0.0;
    return smooth_ramp((b_ - axi) / (b_ - a_));
}

double SchwartzWindow::time_profile(double x) const {
    const double ax = std::abs(x);
    if (ax >= cutoff_) return 0.0;
    const auto& s = *samples_;
    const double p = ax / grid_step_;
    long i0 = static_cast<long>(std::floor(p)) - 2;
    i0 = std::clamp<long>(i0, 0, static_cast<long>(s.size()) - 6);
    const double t = p - static_cast<double>(i0);
    // 6-point Lagrange stencil on the uniform grid
    double out = 0;
    for (int m = 0; m < 6; ++m) {
        double w = 1;
        for (int q = 0; q < 6; ++q)
            if (q != m) w *= (t - q) / (m - q);
        out += w * s[static_cast<size_t>(i0) + static_cast<size_t>(m)];
    }
    return out;
}

// ---- Poisson decay ---------------------------------------------------------------------

PoissonDecayReport poisson_decay_test(const SpectralMeasure& mu, const SchwartzWindow& window,
                                      std::span<const double> t_grid, double c,
                                      double fit_lo, double fit_hi, double N_target,
                                      double fit_floor) {
    if (!(window.outer() < kTwoPi))
        throw validation_error("poisson_decay_test: window outer radius must stay below 2 pi");
    if (!(c > 0)) throw validation_error("poisson_decay_test: c > 0");

    // reduction to unit lattice rate: positions scale by 1/c, masses unchanged
    std::vector<double> pos;
    std::vector<double> mass;
    pos.reserve(mu.real_atoms().size());
    for (const auto& a : mu.real_atoms()) {
        pos.push_back(a.position / c);
        mass.push_back(a.mass);
    }

    const double t_max = *std::max_element(t_grid.begin(), t_grid.end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (pos.empty() || pos.back() < std::abs(t_max) + window.cutoff())
        throw validation_error("poisson_decay_test: atom range must extend past t_max plus the window cutoff");

    PoissonDecayReport rep;
    rep.N_target = N_target;
    rep.t.assign(t_grid.begin(), t_grid.end());
    rep.D.reserve(rep.t.size());

    for (double t : rep.t) {
        const double lo = t - window.cutoff();
        const double hi = t + window.cutoff();
        const auto first = std::lower_bound(pos.begin(), pos.end(), lo);
        const auto last = std::upper_bound(pos.begin(), pos.end(), hi);
        KahanSum acc;
        for (auto it = first; it != last; ++it) {
            const size_t i = static_cast<size_t>(it - pos.begin());
            acc.add(mass[i] * window.time_profile(t - *it));
        }
        const double D = acc.value() - 1.0 / kTwoPi;
        rep.D.push_back(D);
        rep.max_abs_D = std::max(rep.max_abs_D, std::abs(D));
    }

    std::vector<double> lx, ly;
    for (size_t i = 0; i < rep.t.size(); ++i) {
        if (rep.t[i] < fit_lo || rep.t[i] > fit_hi) continue;
        const double mag = std::abs(rep.D[i]);
        if (mag < fit_floor) continue;
        lx.push_back(std::log(rep.t[i]));
        ly.push_back(std::log(mag));
    }
    if (lx.size() >= 4) {
        rep.loglog_fit = fit_line(lx, ly);
        rep.superpolynomial_consistent = rep.loglog_fit.slope <= -N_target;
    } else {
        // everything at the noise floor: consistent with arbitrary decay
        rep.superpolynomial_consistent = true;
        rep.loglog_fit.slope = -std::numeric_limits<double>::infinity();
    }
    return rep;
}

// ---- stable orthogonality ----------------------------------------------------------------

StableOrthogonalityReport stable_orthogonality_certificate(const GammaDiffeo& X, double c,
                                                           double R_max,
                                                           std::span<const double> A_list) {
    StableOrthogonalityReport rep;
    rep.certificate.statement = "stable-orthogonality";
    rep.certificate.anchor =
        "lattice distortion grows without bound and its counting profile excludes type pi/c zero sets";
    rep.certificate.direction = "predicate";
    rep.certificate.truncation_radius = R_max;
    rep.certificate.params = {{"family", X.family_name()}, {"beta", X.beta()}, {"c", c}};

    // gamma-class gate
    std::vector<double> tg;
    for (int i = -200; i <= 200; ++i) tg.push_back(i * std::max(1.0, R_max / 2000.0));
    const auto gamma = gamma_check(X, tg, 4);
    const bool gamma_ok = gamma.certificate.holds();

    // X(t) - t must increase without bound on the tested range
    const int n_win = 6, per = 64;
    std::vector<double> means(n_win, 0.0);
    for (int w = 0; w < n_win; ++w) {
        for (int i = 0; i < per; ++i) {
            const double t =
                2.0 * std::pow(R_max / 2.0, (w * per + i + 1.0) / (n_win * per));
            means[w] += X(t) - t;
        }
        means[w] /= per;
    }
    std::vector<double> incs(means.size() - 1);
    for (size_t i = 1; i < means.size(); ++i) incs[i - 1] = means[i] - means[i - 1];
    const bool increasing_tail = means[n_win - 1] > means[n_win - 2] &&
                                 means[n_win - 2] > means[n_win - 3] &&
                                 means[n_win - 1] >= means[0] + 0.5;
    rep.shift_unbounded = increasing_tail && classify_increments(incs) != Trend::converged;

    // counting profile of X(cZ)
    const int K = static_cast<int>(std::ceil(X.inverse(R_max) / c)) + 2;
    std::vector<double> lambda;
    lambda.reserve(2 * K + 1);
    for (int k = -K; k <= K; ++k) lambda.push_back(X(c * k));
    rep.exclusion = krein_exclusion(lambda, c, A_list, R_max);

    const bool ok = gamma_ok && rep.shift_unbounded && rep.exclusion.certificate.holds();
    rep.certificate.verdict = ok ? "holds" : "fails";
    rep.certificate.evidence["gamma_check"] = gamma.certificate.verdict;
    rep.certificate.evidence["shift_means"] = means;
    rep.certificate.evidence["shift_unbounded"] = rep.shift_unbounded;
    rep.certificate.evidence["exclusion"] = rep.exclusion.certificate.verdict;
    return rep;
}

} // namespace typelab
