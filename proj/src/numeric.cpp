#include "typelab/numeric.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numbers>

#include "typelab/errors.hpp"

namespace typelab {

namespace {

// Newton iteration on Legendre polynomials; standard construction.
std::vector<QuadNode> make_gauss_legendre(int n) {
    std::vector<QuadNode> nodes(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        nodes[i] = {-x, w};
        nodes[n - 1 - i] = {x, w};
    }
    return nodes;
}

} // namespace

const std::vector<QuadNode>& gauss_legendre(int order) {
    static std::map<int, std::vector<QuadNode>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, make_gauss_legendre(order)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels, int order) {
    if (panels < 1) throw validation_error("integrate_gl: panels >= 1");
    const auto& nodes = gauss_legendre(order);
    const double h = (b - a) / panels;
    KahanSum acc;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        for (const auto& nd : nodes) acc.add(0.5 * h * nd.w * f(mid + 0.5 * h * nd.x));
    }
    return acc.value();
}

double integrate_simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n < 2) throw validation_error("integrate_simpson: n >= 2");
    if (n % 2) ++n;
    const double h = (b - a) / n;
    KahanSum acc;
    acc.add(f(a));
    acc.add(f(b));
    for (int i = 1; i < n; ++i) acc.add((i % 2 ? 4.0 : 2.0) * f(a + i * h));
    return acc.value() * h / 3.0;
}

double smooth_ramp(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    const double ba = std::exp(-1.0 / u);
    const double bb = std::exp(-1.0 / (1.0 - u));
    return ba / (ba + bb);
}

double BumpFunction::operator()(double x) const {
    if (x <= lo || x >= hi) return 0.0;
    const double u = 2.0 * (x - lo) / (hi - lo) - 1.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double log_sum_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

double sine_integral_complement(double u) {
    if (u < 0) throw validation_error("sine_integral_complement: u >= 0");
    if (u <= 20.0) {
        // Si(u) = sum (-1)^k u^{2k+1} / ((2k+1)(2k+1)!)
        double si = 0;
        double t = u;  // u^{2k+1}/(2k+1)!
        for (int k = 0; k <= 60; ++k) {
            si += t / (2.0 * k + 1.0);
            t *= -u * u / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            if (std::abs(t) < 1e-300) break;
        }
        return std::numbers::pi / 2.0 - si;
    }
    // pi/2 - Si(u) = f(u) cos u + g(u) sin u,
    // f ~ (1/u)(1 - 2!/u^2 + 4!/u^4 - ...), g ~ (1/u^2)(1 - 3!/u^2 + ...)
    const double iu2 = 1.0 / (u * u);
    double f = 0, g = 0;
    double fk = 1.0 / u, gk = iu2;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 10; ++k) {
        if (std::abs(fk) > prev) break;  // asymptotic series: stop at the smallest term
        f += fk;
        g += gk;
        prev = std::abs(fk);
        fk *= -(2.0 * k + 1.0) * (2.0 * k + 2.0) * iu2;
        gk *= -(2.0 * k + 2.0) * (2.0 * k + 3.0) * iu2;
    }
    return f * std::cos(u) + g * std::sin(u);
}

void fft_radix2(std::vector<std::complex<double>>& data, int sign) {
    const size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) throw validation_error("fft_radix2: size must be a power of two");
    // bit reversal
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const auto u = data[i + j];
                const auto v = data[i + j + len / 2] * w;
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

QuadraticFit fit_quadratic(std::span<const double> u, std::span<const double> y) {
    if (u.size() != y.size() || u.size() < 3)
        throw validation_error("fit_quadratic: need >= 3 matching points");
    const int n = static_cast<int>(u.size());
    // normal equations for [1, u, u^2]
    double s0 = n, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double t0 = 0, t1 = 0, t2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = u[i], x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        t0 += y[i];
        t1 += x * y[i];
        t2 += x2 * y[i];
    }
    // solve 3x3 via Cramer
    const double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s3 * s2) + s2 * (s1 * s3 - s2 * s2);
    if (det == 0) throw validation_error("fit_quadratic: singular system");
    QuadraticFit f;
    f.c0 = (t0 * (s2 * s4 - s3 * s3) - s1 * (t1 * s4 - s3 * t2) + s2 * (t1 * s3 - s2 * t2)) / det;
    f.c1 = (s0 * (t1 * s4 - t2 * s3) - t0 * (s1 * s4 - s3 * s2) + s2 * (s1 * t2 - t1 * s2)) / det;
    f.c2 = (t0 * (s1 * s3 - s2 * s2) - t1 * (s0 * s3 - s1 * s2) + t2 * (s0 * s2 - s1 * s1)) / det;
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (f.c0 + f.c1 * u[i] + f.c2 * u[i] * u[i]);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    return f;
}

std::string fnv1a_hex(std::span<const char> bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace typelab
