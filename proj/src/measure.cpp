#include "typelab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "typelab/errors.hpp"
#include "typelab/numeric.hpp"

namespace typelab {

// ---- PiecewiseDensity -----------------------------------------------------

void PiecewiseDensity::validate() const {
    if (grid.size() != values.size() || grid.size() < 2)
        throw validation_error("density: grid/values must match with >= 2 nodes");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw validation_error("density: grid not increasing");
    for (double v : values)
        if (!(v >= 0)) throw validation_error("density: negative sample");
}

double PiecewiseDensity::operator()(double x) const {
    if (x <= grid.front() || x >= grid.back()) {
        if (x == grid.front()) return values.front();
        if (x == grid.back()) return values.back();
        return 0.0;
    }
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const size_t i = static_cast<size_t>(it - grid.begin());
    const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return values[i - 1] + t * (values[i] - values[i - 1]);
}

double PiecewiseDensity::integrate(double lo, double hi) const {
    if (hi <= lo) return 0.0;
    lo = std::max(lo, grid.front());
    hi = std::min(hi, grid.back());
    if (hi <= lo) return 0.0;
    KahanSum acc;
    const auto& self = *this;
    size_t i = static_cast<size_t>(std::upper_bound(grid.begin(), grid.end(), lo) - grid.begin());
    double cur = lo;
    for (; cur < hi && i < grid.size(); ++i) {
        const double next = std::min(grid[i], hi);
        if (next > cur) {
            // trapezoid is exact on a linear segment
            acc.add(0.5 * (self(cur) + self(next)) * (next - cur));
            cur = next;
        }
    }
    return acc.value();
}

double PiecewiseDensity::integrate_weighted(double lo, double hi,
                                            const std::function<double(double)>& w) const {
    if (hi <= lo) return 0.0;
    lo = std::max(lo, grid.front());
    hi = std::min(hi, grid.back());
    if (hi <= lo) return 0.0;
    KahanSum acc;
    const auto& self = *this;
    size_t i = static_cast<size_t>(std::upper_bound(grid.begin(), grid.end(), lo) - grid.begin());
    double cur = lo;
    for (; cur < hi && i <= grid.size(); ++i) {
        const double next = (i < grid.size()) ? std::min(grid[i], hi) : hi;
        if (next > cur) {
            const int panels = std::max(1, static_cast<int>((next - cur) / 0.25));
            acc.add(integrate_gl([&](double x) { return self(x) * w(x); }, cur, next,
                                 panels, 12));
            cur = next;
        }
        if (cur >= hi) break;
    }
    return acc.value();
}

// ---- SpectralMeasure --------------------------------------------------------

SpectralMeasure::SpectralMeasure(std::vector<Atom> real_atoms,
                                 std::optional<PiecewiseDensity> real_density,
                                 std::vector<ImagAtom> imag_atoms, bool symmetric,
                                 double truncation_radius)
    : real_atoms_(std::move(real_atoms)),
      real_density_(std::move(real_density)),
      imag_atoms_(std::move(imag_atoms)),
      symmetric_(symmetric),
      truncation_radius_(truncation_radius) {
    for (size_t i = 0; i < real_atoms_.size(); ++i) {
        if (!(real_atoms_[i].mass > 0)) throw validation_error("measure: atom mass must be positive");
        if (i && !(real_atoms_[i].position > real_atoms_[i - 1].position))
            throw validation_error("measure: atom positions must be strictly increasing");
    }
    if (real_density_) real_density_->validate();
    for (const auto& ia : imag_atoms_) {
        if (!(ia.height > 0)) throw validation_error("measure: imaginary atom height must be positive");
        if (!(ia.mass > 0)) throw validation_error("measure: imaginary atom mass must be positive");
    }
    if (!(truncation_radius_ > 0)) throw validation_error("measure: truncation radius must be positive");
    if (symmetric_) {
        // exact mirror check: every atom at p has a partner at -p of equal mass
        const size_t n = real_atoms_.size();
        for (size_t i = 0; i < n; ++i) {
            const Atom& a = real_atoms_[i];
            const Atom& b = real_atoms_[n - 1 - i];
            if (b.position != -a.position || b.mass != a.mass)
                throw validation_error("measure: symmetric flag set but atoms are not mirror-exact");
        }
    }
}

SpectralMeasure SpectralMeasure::from_atoms(std::vector<Atom> atoms, double radius,
                                            bool symmetric) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.position < b.position; });
    return SpectralMeasure(std::move(atoms), std::nullopt, {}, symmetric, radius);
}

SpectralMeasure SpectralMeasure::lattice(double spacing, double mass, int count) {
    if (!(spacing > 0) || !(mass > 0) || count < 0)
        throw validation_error("lattice: spacing, mass > 0 and count >= 0");
    std::vector<Atom> atoms;
    atoms.reserve(2 * count + 1);
    for (int k = -count; k <= count; ++k) atoms.push_back({spacing * k, mass});
    return SpectralMeasure(std::move(atoms), std::nullopt, {}, true,
                           spacing * count + 1.0);
}

SpectralMeasure SpectralMeasure::lebesgue(double level, double radius) {
    PiecewiseDensity d{{-radius, radius}, {level, level}};
    return SpectralMeasure({}, d, {}, true, radius);
}

double SpectralMeasure::atomic_mass(double lo, double hi) const {
    if (hi < lo) return 0.0;
    auto first = std::lower_bound(real_atoms_.begin(), real_atoms_.end(), lo,
                                  [](const Atom& a, double v) { return a.position < v; });
    KahanSum acc;
    for (auto it = first; it != real_atoms_.end() && it->position <= hi; ++it)
        acc.add(it->mass);
    return acc.value();
}

double SpectralMeasure::mass(double lo, double hi) const {
    double m = atomic_mass(lo, hi);
    if (real_density_) m += real_density_->integrate(lo, hi);
    return m;
}

double SpectralMeasure::sum_atoms(const std::function<double(const Atom&)>& w) const {
    // ascending |position|; merge the two halves of the sorted array
    const auto& a = real_atoms_;
    auto split = std::lower_bound(a.begin(), a.end(), 0.0,
                                  [](const Atom& at, double v) { return at.position < v; });
    long i = static_cast<long>(split - a.begin()) - 1;  // walks left (negatives)
    size_t j = static_cast<size_t>(split - a.begin());  // walks right (nonnegatives)
    KahanSum acc;
    while (i >= 0 || j < a.size()) {
        const bool take_right =
            (i < 0) || (j < a.size() && a[j].position <= -a[i].position);
        if (take_right) {
            acc.add(w(a[j]));
            ++j;
        } else {
            acc.add(w(a[i]));
            --i;
        }
    }
    return acc.value();
}

SpectralMeasure SpectralMeasure::scaled(double factor) const {
    if (!(factor > 0)) throw validation_error("scaled: factor must be positive");
    std::vector<Atom> atoms = real_atoms_;
    for (auto& a : atoms) a.mass *= factor;
    std::optional<PiecewiseDensity> d = real_density_;
    if (d)
        for (auto& v : d->values) v *= factor;
    std::vector<ImagAtom> ia = imag_atoms_;
    for (auto& a2 : ia) a2.mass *= factor;
    return SpectralMeasure(std::move(atoms), std::move(d), std::move(ia), symmetric_,
                           truncation_radius_);
}

// ---- ExpInterval ------------------------------------------------------------

double ExpInterval::half_length() const { return scale * std::exp(-delta * std::abs(center)); }
double ExpInterval::lo() const { return center - half_length(); }
double ExpInterval::hi() const { return center + half_length(); }

// ---- growth -----------------------------------------------------------------

GrowthReport polynomial_growth_exponent(const SpectralMeasure& mu,
                                        std::span<const double> s_grid,
                                        std::span<const double> windows) {
    if (s_grid.empty()) throw validation_error("growth: empty s grid");
    if (windows.size() < 2) throw validation_error("growth: need at least two windows");
    for (size_t i = 1; i < windows.size(); ++i)
        if (!(windows[i] > windows[i - 1]))
            throw validation_error("growth: windows must be strictly increasing");
    if (mu.mass(-windows.back(), windows.back()) == 0.0)
        throw validation_error("growth: measure has no content on the largest window");

    GrowthReport rep;
    for (double s : s_grid) {
        GrowthEntry e;
        e.s = s;
        // |0|^{2s} = 0 for every s >= 0, so the origin always carries weight 1
        const auto weight = [s](double x) {
            return x == 0.0 ? 1.0 : 1.0 / (1.0 + std::pow(std::abs(x), 2.0 * s));
        };
        for (double w : windows) {
            KahanSum acc;
            acc.add(mu.sum_atoms([&](const Atom& a) {
                return std::abs(a.position) <= w ? a.mass * weight(a.position) : 0.0;
            }));
            if (mu.real_density())
                acc.add(mu.real_density()->integrate_weighted(-w, w, weight));
            e.partials.push_back(acc.value());
        }
        e.trend = classify_partials(e.partials);
        rep.entries.push_back(std::move(e));
    }
    for (const auto& e : rep.entries)
        if (e.trend == Trend::converged) {
            if (!rep.minimal_s || e.s < *rep.minimal_s) rep.minimal_s = e.s;
        }
    return rep;
}

// ---- majorization -------------------------------------------------------------

namespace {

// support points of mu within the truncation (atoms, density grid nodes)
std::vector<double> support_points(const SpectralMeasure& mu) {
    std::vector<double> pts;
    for (const auto& a : mu.real_atoms()) pts.push_back(a.position);
    if (mu.real_density()) {
        const auto& d = *mu.real_density();
        for (size_t i = 0; i + 1 < d.grid.size(); ++i) {
            if (d.values[i] > 0 || d.values[i + 1] > 0) {
                pts.push_back(d.grid[i]);
                pts.push_back(d.grid[i + 1]);
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

double ulp_at(double p) {
    const double a = std::abs(p) + 1.0;
    return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

void require_grid_adequate(const SpectralMeasure& mu, double delta,
                           std::span<const double> x_grid) {
    // Around every support point p: the grid must cross [p-2h, p+2h] with
    // local spacing <= h/4, h = e^{-delta |p|}.  Once h/4 falls below the
    // machine spacing at |p| the interval degenerates to the representable
    // point p itself, and hitting p (to one ulp) is all a grid can do.
    const auto pts = support_points(mu);
    for (double p : pts) {
        if (std::abs(p) > mu.truncation_radius()) continue;
        const double h = std::exp(-delta * std::abs(p));
        const double u = ulp_at(p);
        if (0.25 * h <= 8.0 * u) {
            auto it = std::lower_bound(x_grid.begin(), x_grid.end(), p - 8.0 * u);
            if (it == x_grid.end() || *it > p + 8.0 * u)
                throw grid_error("majorization grid misses the degenerate interval at x = " +
                                 std::to_string(p));
            continue;
        }
        const double lo = p - 2 * h;
        const double hi = p + 2 * h;
        const double max_gap = 0.25 * h + 2.0 * u;
        auto it = std::lower_bound(x_grid.begin(), x_grid.end(), lo);
        double prev = lo;
        for (; it != x_grid.end() && *it <= hi; ++it) {
            if (*it - prev > max_gap)
                throw grid_error("majorization grid too coarse near x = " + std::to_string(p) +
                                 " (need spacing <= e^{-delta|x|}/4)");
            prev = *it;
        }
        if (hi - prev > max_gap)
            throw grid_error("majorization grid too coarse near x = " + std::to_string(p) +
                             " (need spacing <= e^{-delta|x|}/4)");
    }
}

} // namespace

std::vector<double> make_majorization_grid(const SpectralMeasure& mu,
                                           const SpectralMeasure& mu_tilde,
                                           double delta) {
    std::vector<double> grid;
    const auto add_cluster = [&](double p) {
        const double h = std::exp(-delta * std::abs(p));
        if (0.25 * h <= 8.0 * ulp_at(p)) {
            // window below machine resolution: the center is the only
            // placement with content
            grid.push_back(p);
            return;
        }
        for (int j = -11; j <= 11; ++j) grid.push_back(p + j * 0.2 * h);
    };
    for (const SpectralMeasure* m : {&mu, &mu_tilde}) {
        for (double p : support_points(*m)) add_cluster(p);
        if (m->real_density()) {
            // coarse sweep over density support; adequate only when the
            // support radius keeps e^{-delta R} resolvable
            const auto& d = *m->real_density();
            const double R = std::max(std::abs(d.grid.front()), std::abs(d.grid.back()));
            const double h = std::exp(-delta * R) * 0.2;
            if ((d.grid.back() - d.grid.front()) / h > 5e7)
                throw grid_error("density support too wide to resolve e^{-delta R} windows");
            for (double x = d.grid.front(); x <= d.grid.back(); x += h) grid.push_back(x);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

MajorizationWitness majorization_check(const SpectralMeasure& mu,
                                       const SpectralMeasure& mu_tilde, double delta,
                                       int n, double C, std::span<const double> x_grid) {
    if (!(delta > 0) || !(C > 0) || n < 0)
        throw validation_error("majorization: need delta > 0, C > 0, n >= 0");
    if (x_grid.empty()) throw validation_error("majorization: empty grid");
    require_grid_adequate(mu, delta, x_grid);

    MajorizationWitness w;
    w.delta = delta;
    w.C = C;
    w.n = n;
    for (double x : x_grid) {
        const ExpInterval I{x, delta, 1.0};
        const double lhs = mu.mass(I.lo(), I.hi());
        if (lhs == 0.0) continue;
        const ExpInterval I2{x, delta, 2.0};
        const double rhs = C * std::pow(1.0 + std::abs(x), n) *
                           (mu_tilde.mass(I2.lo(), I2.hi()) + std::exp(-2.0 * delta * std::abs(x)));
        if (lhs > rhs) w.violations.push_back(x);
    }
    return w;
}

std::optional<MajorizationWitness> majorization_search(const SpectralMeasure& mu,
                                                       const SpectralMeasure& mu_tilde,
                                                       const MajorizationLattice& lattice) {
    for (double delta : lattice.deltas) {
        const auto grid = make_majorization_grid(mu, mu_tilde, delta);
        for (int n : lattice.ns)
            for (double C : lattice.Cs) {
                auto w = majorization_check(mu, mu_tilde, delta, n, C, grid);
                if (w.holds()) return w;
            }
    }
    return std::nullopt;
}

WeakEquivalenceReport weak_equivalence_check(const SpectralMeasure& mu,
                                             const SpectralMeasure& nu, double delta,
                                             int n, double C) {
    WeakEquivalenceReport rep;
    const auto grid_f = make_majorization_grid(mu, nu, delta);
    rep.forward = majorization_check(mu, nu, delta, n, C, grid_f);
    const auto grid_b = make_majorization_grid(nu, mu, delta);
    rep.backward = majorization_check(nu, mu, delta, n, C, grid_b);
    rep.equivalent = rep.forward.holds() && rep.backward.holds();
    return rep;
}

// ---- tails ---------------------------------------------------------------------

TailFunction::TailFunction(std::vector<double> breakpoints, std::vector<double> suffix,
                           double radius)
    : breakpoints_(std::move(breakpoints)), suffix_(std::move(suffix)), radius_(radius) {
    if (breakpoints_.size() != suffix_.size())
        throw validation_error("tail: breakpoints/suffix size mismatch");
}

double TailFunction::operator()(double lambda) const {
    // mass strictly to the right of lambda
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), lambda);
    const size_t i = static_cast<size_t>(it - breakpoints_.begin());
    return i < suffix_.size() ? suffix_[i] : 0.0;
}

double TailFunction::last_nonzero() const {
    for (size_t i = breakpoints_.size(); i-- > 0;) {
        if (suffix_[i] != 0.0) return breakpoints_[i];
    }
    return 0.0;
}

double TailFunction::weighted_abs_integral(double delta, double hi) const {
    // psi is constant on the gaps between breakpoints; integrate exactly
    KahanSum acc;
    double lo = 0.0;
    const auto push = [&](double a, double b, double level) {
        if (b <= a || level == 0.0) return;
        acc.add(std::abs(level) * (std::exp(delta * b) - std::exp(delta * a)) / delta);
    };
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), 0.0);
    size_t i = static_cast<size_t>(it - breakpoints_.begin());
    for (; i < breakpoints_.size() && lo < hi; ++i) {
        const double b = std::min(breakpoints_[i], hi);
        push(lo, b, suffix_[i]);
        lo = std::max(lo, b);
    }
    return acc.value();
}

TailDifferenceResult tail_difference(const SpectralMeasure& mu_R,
                                     const SpectralMeasure& mu_0,
                                     std::span<const double> lambda_grid) {
    const double r1 = mu_R.truncation_radius();
    const double r0 = mu_0.truncation_radius();
    if (std::max(r1, r0) > 2.0 * std::min(r1, r0) + 1.0)
        throw validation_error("tail_difference: truncation radii do not overlap sensibly");
    if (mu_R.real_density() || mu_0.real_density())
        throw validation_error("tail_difference: density parts are not supported here; "
                               "compare atomic parts");

    struct Signed {
        double pos;
        double mass;
    };
    std::vector<Signed> merged;
    merged.reserve(mu_R.real_atoms().size() + mu_0.real_atoms().size());
    for (const auto& a : mu_R.real_atoms()) merged.push_back({a.position, a.mass});
    for (const auto& a : mu_0.real_atoms()) merged.push_back({a.position, -a.mass});
    std::sort(merged.begin(), merged.end(),
              [](const Signed& a, const Signed& b) { return a.pos < b.pos; });

    std::vector<double> bps;
    std::vector<double> mass_at;
    for (const auto& s : merged) {
        if (!bps.empty() && bps.back() == s.pos)
            mass_at.back() += s.mass;
        else {
            bps.push_back(s.pos);
            mass_at.push_back(s.mass);
        }
    }
    std::vector<double> suffix(bps.size());
    double run = 0;
    for (size_t i = bps.size(); i-- > 0;) {
        run += mass_at[i];
        suffix[i] = run;
    }
    TailFunction psi(std::move(bps), std::move(suffix), std::max(r1, r0));

    TailDifferenceResult res{psi, {}, {}};
    res.grid.assign(lambda_grid.begin(), lambda_grid.end());
    res.values.reserve(res.grid.size());
    for (double l : res.grid) res.values.push_back(psi(l));
    return res;
}

Certificate proximity_test(const TailFunction& psi, double delta) {
    if (!(delta > 0)) throw validation_error("proximity: delta must be positive");
    Certificate cert;
    cert.statement = "proximity-integral";
    cert.anchor = "weighted tail integral of the measure difference stays finite";
    cert.direction = "predicate";
    cert.truncation_radius = psi.radius();
    cert.params = {{"delta", delta}};

    const double lz = psi.last_nonzero();
    const double R = psi.radius();
    cert.evidence["last_nonzero"] = lz;

    // unit-window partial integrals up to the last content
    std::vector<double> partials;
    double total = 0;
    const int nwin = static_cast<int>(std::ceil(std::max(lz, 1.0)));
    std::vector<double> increments;
    for (int j = 0; j < nwin; ++j) {
        const double upto = psi.weighted_abs_integral(delta, j + 1.0);
        increments.push_back(upto - total);
        total = upto;
        partials.push_back(total);
    }
    const double value = psi.weighted_abs_integral(delta, R);
    cert.value = value;
    cert.evidence["partials"] = partials;

    if (lz == 0.0) {
        cert.verdict = "finite";
        cert.value = 0.0;
        return cert;
    }
    if (lz >= 0.9 * R) {
        // content runs into the truncation edge: a finite value cannot be
        // trusted; report growth if the increments say so
        const Trend t = classify_increments(increments);
        cert.verdict = (t == Trend::growing) ? "growing" : "inconclusive";
        if (cert.verdict == "inconclusive")
            cert.evidence["note"] = "psi not eventually zero well inside the truncation";
        return cert;
    }
    cert.verdict = "finite";
    return cert;
}

Certificate imag_tail_test(const SpectralMeasure& mu, double delta, ImagTailMode mode,
                           double x) {
    Certificate cert;
    cert.statement = mode == ImagTailMode::gaussian ? "imag-tail-gaussian" : "imag-tail-exponential";
    cert.anchor = mode == ImagTailMode::gaussian
                      ? "gaussian-weighted mass of the imaginary-axis atoms stays finite"
                      : "exponentially weighted imaginary-axis tails stay finite";
    cert.direction = "predicate";
    cert.truncation_radius = mu.truncation_radius();
    cert.params = {{"delta", delta}, {"mode", mode == ImagTailMode::gaussian ? "gaussian" : "exponential"}, {"x", x}};

    auto atoms = mu.imag_atoms();
    std::sort(atoms.begin(), atoms.end(),
              [](const ImagAtom& a, const ImagAtom& b) { return a.height < b.height; });

    std::vector<double> increments;
    increments.reserve(atoms.size());
    KahanSum acc;
    for (const auto& a : atoms) {
        const double w = mode == ImagTailMode::gaussian
                             ? std::exp(delta * a.height * a.height)
                             : std::exp(x * a.height);
        const double term = a.mass * w;
        increments.push_back(term);
        acc.add(term);
    }
    cert.value = acc.value();
    cert.evidence["terms"] = increments.size();
    const Trend t = classify_increments(increments);
    cert.verdict = (t == Trend::growing) ? "growing" : "finite";
    return cert;
}

} // namespace typelab
