#ifndef TYPELAB_NUMERIC_HPP
#define TYPELAB_NUMERIC_HPP

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace typelab {

// Compensated accumulator; strict mode sums in a fixed order through this.
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0;
    double comp_ = 0;
};

struct QuadNode {
    double x;
    double w;
};

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order and cached.
const std::vector<QuadNode>& gauss_legendre(int order);

// Composite Gauss-Legendre over [a, b] split into `panels` equal panels.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels, int order = 12);

// Composite Simpson with n (even) subintervals; the plain second opinion.
double integrate_simpson(const std::function<double(double)>& f, double a, double b, int n);

// C-infinity ramp: 0 at u<=0, 1 at u>=1, flat to all orders at both ends.
double smooth_ramp(double u);

// C-infinity bump supported on (lo, hi), peak value 1 at the midpoint.
struct BumpFunction {
    double lo;
    double hi;
    double operator()(double x) const;
};

// log(e^a + e^b) without overflow.
double log_sum_exp(double a, double b);

// pi/2 - Si(u) for u >= 0: power series below u = 20, asymptotic beyond.
double sine_integral_complement(double u);

// In-place radix-2 FFT, sign=-1 forward; n must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data, int sign);

// Least-squares fit of y ~ c0 + c1 u + c2 u^2.
struct QuadraticFit {
    double c0 = 0, c1 = 0, c2 = 0;
    double rms_residual = 0;
};
QuadraticFit fit_quadratic(std::span<const double> u, std::span<const double> y);

// FNV-1a of a byte string, hex-encoded; used for input digests in run logs.
std::string fnv1a_hex(std::span<const char> bytes);

} // namespace typelab

#endif
