#ifndef TYPELAB_SHARPNESS_HPP
#define TYPELAB_SHARPNESS_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "typelab/certificate.hpp"
#include "typelab/entire.hpp"
#include "typelab/trend.hpp"

namespace typelab {

// Nonincreasing positive rate with eps(r) -> 0.  Evaluation is offered both
// in r and in u = log r; the log channel stays finite where e^u overflows.
class EpsilonRate {
public:
    EpsilonRate(std::function<double(double)> eval_r,
                std::function<double(double)> eval_log, std::string name);

    static EpsilonRate inverse_log();          // 1/log(e + r)
    static EpsilonRate power(double alpha);    // min(1, r^-alpha)

    double operator()(double r) const { return eval_r_(r); }
    double at_log(double u) const { return eval_log_(u); }
    // sup over t >= a of eps(e^t); equals eps(e^a) for a nonincreasing rate
    double sup_tail_log(double a) const { return eval_log_(a); }
    const std::string& name() const { return name_; }

    void check_monotone(std::span<const double> r_grid) const;

private:
    std::function<double(double)> eval_r_;
    std::function<double(double)> eval_log_;
    std::string name_;
};

// ---- slow-divergence weight pair -------------------------------------------

struct ConvexStep {
    int n = 0;
    double a = 0, b = 0, gamma = 0;
    double log_slope = 0;      // log of gamma (e^b - e^a)/(b - a)
    double root = 0;           // where the linear piece crosses zero
    double int_main = 0;       // int_a^b f_n e^-x dx            (>= 1)
    double int_head = 0;       // int_0^a f_n e^-x dx            (<= (e-1) gamma)
    double int_tail = 0;       // int_b^inf f_n e^-x dx          (<= 2 gamma)
    double cap_integral = 0;   // gamma (b-a)                    (< 2^-n)
};

// f = sum of truncated linear pieces; log f is what gets evaluated, since f
// reaches e^{a_n}-scale values far beyond double range in x-space.
struct PiecewiseConvexF {
    std::vector<ConvexStep> steps;
    double log_f(double u) const;  // log of sum of pieces at u (log-domain), -inf when 0
};

struct WeightPairResult {
    PiecewiseConvexF f;
    std::vector<double> divergence_partials;  // partial sums of the main integrals
    std::vector<double> capped_increments;       // per-step increments of the capped integral
    double gamma_sum = 0;
    std::optional<EpsilonRate> eps;

    // log of -log phi at x = e^u; phi = e^{-f(log^+ |x|)}, so this is log f(u)
    double log_f_u(double u) const { return f.log_f(u); }

    // log of -log psi at x = e^u; psi = phi + e^{-eps(|x|) |x|}, computed in
    // the log domain so it stays finite where f(u) dwarfs double range
    double log_neg_log_psi_u(double u) const;
};

// Inductive construction: per step n, the smallest integer a admitting a
// feasible b on the a+1+j/8 grid (growth cap first, then the two step
// inequalities), with every per-step bound re-verified from closed forms in
// the shifted variable.
WeightPairResult build_weight_pair(const EpsilonRate& eps, int n_max);

// ---- logarithmic integral ----------------------------------------------------

struct LogIntegralReport {
    std::vector<double> partials;
    DivergenceVerdict verdict = DivergenceVerdict::inconclusive;
};

// int log(1/w(x)) / (1+x^2) dx over expanding windows, with the integrand
// supplied as neg_log_w(x) = log(1/w(x)).
LogIntegralReport log_integral_report(const std::function<double(double)>& neg_log_w,
                                      std::span<const double> windows);

// Same integral through the substitution x = e^u (two-sided, even integrand
// assumed); windows are in u.  Integrable up to arbitrary u.
LogIntegralReport log_integral_report_u(const std::function<double(double)>& neg_log_w_u,
                                        std::span<const double> u_windows);

// ---- interval system of the second construction -------------------------------

struct IntervalTerm {
    int k = 0;
    double log_y = 0;          // t_k = log y_k; I_k = [y_k, 2 y_k]
    double gamma = 0;          // k * eps(y_k)
    double quad_identity = 0;  // quadrature of the shifted profile integral (should be e*gamma)
    double ratio_bound = 0;    // eps(e^x) e^x / phi(x) at x = log(1.5 y_k)  (<= 1/k)
    double ratio_sup = 0;      // sup over interval probes; k * ratio_sup stays bounded
};

struct IntervalSystemResult {
    std::vector<IntervalTerm> terms;
    std::vector<double> gamma_partials;
    bool gamma_cauchy = false;

    // log phi(x) with phi = sum of the ramp profiles, evaluated at u = log r
    double log_phi_u(double u) const;
    std::vector<std::pair<double, double>> log_intervals() const;  // [t_k, t_k + log 2]

    std::vector<double> log_y;
    std::vector<double> gammas;
};

IntervalSystemResult build_interval_system(const EpsilonRate& eps, int k_max, double y1 = 10.0);

// ---- paired node sets ----------------------------------------------------------

struct PairedNodesResult {
    std::vector<int> set_A;  // indices with (2k+1, 2k+2) not inside the interval union
    std::vector<int> set_B;
    FourNodeResult quads;
    std::vector<double> lambda;       // full symmetric node set plus origin
    std::vector<double> lambda_star;  // b_k, d_k dropped for k in B
    struct Pair {
        double x;  // kept node
        double y;  // dropped partner
        double bound;  // e^{-eps(|x|)|x|}
    };
    std::vector<Pair> pairs;
    bool pairing_ok = false;

    struct AnnihilationEntry {
        std::string name;
        double type;
        AnnihilationReport report;
    };
    std::vector<AnnihilationEntry> annihilation;
};

PairedNodesResult build_paired_nodes(const EpsilonRate& eps, int K_max, const IntervalSystemResult& intervals);

} // namespace typelab

#endif
