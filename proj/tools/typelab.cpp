// Command-line front end: loads measures, diffeos, and potentials, runs the
// library pipelines, and writes report.json / data.csv / run.log artifacts.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "typelab/entire.hpp"
#include "typelab/errors.hpp"
#include "typelab/io.hpp"
#include "typelab/measure.hpp"
#include "typelab/nazarov.hpp"
#include "typelab/numeric.hpp"
#include "typelab/sharpness.hpp"
#include "typelab/sturm_liouville.hpp"
#include "typelab/type_certificates.hpp"
#include "typelab/weights.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace typelab;

namespace {

struct RunContext {
    std::string command;
    json params = json::object();
    json results = json::object();
    json inputs = json::object();
    std::vector<Certificate> certificates;
    fs::path out_dir = ".";
    bool strict = true;
    long seed = 0;
    std::vector<std::string> csv_header;
    std::vector<std::vector<double>> csv_columns;

    void record_input(const std::string& label, const fs::path& p) {
        inputs[label] = {{"path", p.string()}, {"digest", file_digest(p)}};
    }

    int finalize(bool require_verdict) {
        fs::create_directories(out_dir);
        json report;
        report["command"] = command;
        report["mode"] = strict ? "strict" : "parallel";
        report["seed"] = seed;
        report["params"] = params;
        report["inputs"] = inputs;
        report["defaults"] = defaults_json();
        report["results"] = results;
        json certs = json::array();
        bool any_decisive = certificates.empty();
        for (const auto& c : certificates) {
            certs.push_back(c.to_json());
            if (c.verdict != "inconclusive") any_decisive = true;
        }
        report["certificates"] = certs;
        write_json_atomic(out_dir / "report.json", report);
        if (!csv_columns.empty()) write_csv_atomic(out_dir / "data.csv", csv_header, csv_columns);

        const auto now = std::chrono::system_clock::now();
        const auto t = std::chrono::system_clock::to_time_t(now);
        std::string log = "typelab 1.0\n";
        log += "command: " + command + "\n";
        log += "mode: " + std::string(strict ? "strict" : "parallel") + "\n";
        const char* threads = std::getenv("TYPELAB_THREADS");
        log += "threads_cap: " + std::string(threads ? threads : "unset") + "\n";
        log += "time: " + std::string(std::ctime(&t));
        for (auto& [k, v] : inputs.items())
            log += "input " + k + ": " + v["digest"].get<std::string>() + "\n";
        write_text_atomic(out_dir / "run.log", log);

        if (require_verdict && !any_decisive) return 3;
        return 0;
    }
};

SpectralMeasure load_measure(RunContext& ctx, const std::string& label, const fs::path& p) {
    ctx.record_input(label, p);
    return measure_from_json(load_json_file(p));
}

std::function<double(double)> load_bump(RunContext& ctx, const fs::path& p, double& lo,
                                        double& hi) {
    ctx.record_input("f", p);
    const json j = load_json_file(p);
    if (j.at("kind").get<std::string>() != "bump")
        throw validation_error("test function file: only {\"kind\":\"bump\",...} is supported");
    lo = j.at("lo").get<double>();
    hi = j.at("hi").get<double>();
    BumpFunction b{lo, hi};
    return [b](double x) { return b(x); };
}

std::vector<double> parse_windows(const std::string& encoded) {
    // "r0:factor:count" geometric windows
    double r0 = 1, factor = 4;
    int count = 8;
    if (!encoded.empty()) {
        std::istringstream ss(encoded);
        char colon;
        ss >> r0 >> colon >> factor >> colon >> count;
    }
    return geometric_windows(r0, factor, count);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for spectral-measure type certificates"};
    app.require_subcommand(1);

    RunContext ctx;
    bool require_verdict = false;
    std::string out_dir = ".";
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_flag("--require-verdict", require_verdict, "exit 3 when no decisive verdict is produced");
    bool parallel = false;
    app.add_flag("--parallel", parallel, "allow data-parallel grid partitioning");
    app.add_option("--seed", ctx.seed, "seed for randomized grid jitter (default none)");

    // ---- measure ------------------------------------------------------------
    auto* measure = app.add_subcommand("measure", "measure-level predicates");
    std::string mu_path, nu_path, windows_spec = "1:4:8", s_list = "0,0.5,1";
    double delta = 1.0, C = 1.0, imag_x = 0.0;
    int maj_n = 0;
    std::string imag_mode = "gaussian";

    auto* m_growth = measure->add_subcommand("growth", "polynomial growth exponent trend");
    m_growth->add_option("--measure", mu_path)->required();
    m_growth->add_option("--windows", windows_spec);
    m_growth->add_option("--s-grid", s_list);

    auto* m_major = measure->add_subcommand("majorize", "interval majorization check");
    m_major->add_option("--measure", mu_path)->required();
    m_major->add_option("--against", nu_path)->required();
    m_major->add_option("--delta", delta);
    m_major->add_option("--n", maj_n);
    m_major->add_option("--C", C);

    auto* m_equiv = measure->add_subcommand("equiv", "two-sided weak equivalence");
    m_equiv->add_option("--measure", mu_path)->required();
    m_equiv->add_option("--against", nu_path)->required();
    m_equiv->add_option("--delta", delta);
    m_equiv->add_option("--n", maj_n);
    m_equiv->add_option("--C", C);

    auto* m_prox = measure->add_subcommand("proximity", "weighted tail-difference integral");
    m_prox->add_option("--measure", mu_path)->required();
    m_prox->add_option("--against", nu_path)->required();
    m_prox->add_option("--delta", delta);

    auto* m_imag = measure->add_subcommand("imagtail", "imaginary-axis tail test");
    m_imag->add_option("--measure", mu_path)->required();
    m_imag->add_option("--delta", delta);
    m_imag->add_option("--mode", imag_mode)->check(CLI::IsMember({"gaussian", "exponential"}));
    m_imag->add_option("--x", imag_x);

    // ---- entire ----------------------------------------------------------------
    auto* entire = app.add_subcommand("entire", "canonical products and zero sets");
    std::string product_name = "sinc";
    int K_count = 1000;
    double eval_re = 0.5, eval_im = 0.0, exclude_c = 1.0, shift_delta = 1.0, shift_M = 0.0;
    double weight_exponent = 0.0;
    std::string A_list_spec = "1,10,100", lambda_path, b_spec = "1.0", shift_rate = "2.0";
    double R_max = 1e4, eta_const = 0.1;
    int quads_K = 100;

    auto* e_eval = entire->add_subcommand("eval", "evaluate a built-in product");
    e_eval->add_option("--product", product_name)->check(CLI::IsMember({"sinc", "sin", "cos"}));
    e_eval->add_option("--K", K_count);
    e_eval->add_option("--re", eval_re);
    e_eval->add_option("--im", eval_im);

    auto* e_krein = entire->add_subcommand("krein", "weighted derivative sums over zeros");
    e_krein->add_option("--product", product_name)->check(CLI::IsMember({"sinc", "sin", "cos"}));
    e_krein->add_option("--K", K_count);
    e_krein->add_option("--weight-exponent", weight_exponent);

    auto* e_annih = entire->add_subcommand("annihilate", "annihilation residual for a test function");
    e_annih->add_option("--product", product_name)->check(CLI::IsMember({"sinc", "sin", "cos"}));
    e_annih->add_option("--K", K_count);
    e_annih->add_option("--b", b_spec);
    double annih_shift = 0.0;
    e_annih->add_option("--shift", annih_shift);

    auto* e_count = entire->add_subcommand("counting", "counting profile of a point set");
    e_count->add_option("--points", lambda_path)->required();

    auto* e_excl = entire->add_subcommand("exclude", "zero-set exclusion certificate");
    e_excl->add_option("--points", lambda_path)->required();
    e_excl->add_option("--c", exclude_c);
    e_excl->add_option("--A-list", A_list_spec);
    e_excl->add_option("--R-max", R_max);

    auto* e_shift = entire->add_subcommand("shift", "perturb zeros inside shrinking intervals");
    e_shift->add_option("--product", product_name)->check(CLI::IsMember({"sinc", "sin", "cos"}));
    e_shift->add_option("--K", K_count);
    e_shift->add_option("--delta", shift_delta);
    e_shift->add_option("--M", shift_M);
    e_shift->add_option("--rate", shift_rate);

    auto* e_quads = entire->add_subcommand("quads", "four-node systems and their product");
    e_quads->add_option("--eta", eta_const);
    e_quads->add_option("--K-max", quads_K);

    // ---- weights -------------------------------------------------------------------
    auto* weights = app.add_subcommand("weights", "weight transforms");
    double wt_delta = 0.5, wt_p = 2.0, wt_range = 10.0;
    int wt_samples = 20001;
    std::string wt_base = "power:4";

    auto* w_transform = weights->add_subcommand("transform", "windowed-infimum weight transform");
    w_transform->add_option("--delta", wt_delta);
    w_transform->add_option("--p", wt_p);
    w_transform->add_option("--range", wt_range);
    w_transform->add_option("--samples", wt_samples);
    w_transform->add_option("--base", wt_base, "constant:c | power:e | integers");

    auto* w_bakan = weights->add_subcommand("bakan", "series weight from approximants");
    int bakan_n = 2, bakan_K = 5;
    w_bakan->add_option("--n", bakan_n);
    w_bakan->add_option("--K", bakan_K);

    // ---- nazarov ----------------------------------------------------------------------
    auto* nazarov = app.add_subcommand("nazarov", "distorted-lattice spectral measures");
    std::string diffeo_path;
    double naz_c = 1.0, t_max = 500.0, win_a = 2.0, win_b = 5.0;
    int naz_K = 100000;

    auto* n_check = nazarov->add_subcommand("check", "diffeomorphism class membership");
    n_check->add_option("--diffeo", diffeo_path)->required();
    n_check->add_option("--t-max", t_max);

    auto* n_build = nazarov->add_subcommand("build", "emit the lattice measure");
    n_build->add_option("--diffeo", diffeo_path)->required();
    n_build->add_option("--c", naz_c);
    n_build->add_option("--K", naz_K);

    auto* n_verify = nazarov->add_subcommand("verify", "smoothed lattice-sum decay");
    n_verify->add_option("--diffeo", diffeo_path)->required();
    n_verify->add_option("--c", naz_c);
    n_verify->add_option("--K", naz_K);
    n_verify->add_option("--t-max", t_max);
    n_verify->add_option("--win-a", win_a);
    n_verify->add_option("--win-b", win_b);

    auto* n_stable = nazarov->add_subcommand("stable", "stable-orthogonality certificate");
    n_stable->add_option("--diffeo", diffeo_path)->required();
    n_stable->add_option("--c", naz_c);
    n_stable->add_option("--R-max", R_max);
    n_stable->add_option("--A-list", A_list_spec);

    // ---- sharpness -------------------------------------------------------------------------
    auto* sharp = app.add_subcommand("sharpness", "counterexample constructions");
    int pair_n_max = 8, interval_k_max = 6, pairs_K = 40;
    std::string eps_spec = "inverse_log";

    auto* s_wpair = sharp->add_subcommand("weightpair", "density-pair construction");
    s_wpair->add_option("--eps", eps_spec);
    s_wpair->add_option("--n-max", pair_n_max);

    auto* s_intervals = sharp->add_subcommand("intervals", "disjoint interval system");
    s_intervals->add_option("--eps", eps_spec);
    s_intervals->add_option("--k-max", interval_k_max);

    auto* s_pairs = sharp->add_subcommand("pairs", "paired node sets");
    s_pairs->add_option("--eps", eps_spec);
    s_pairs->add_option("--K-max", pairs_K);
    s_pairs->add_option("--interval-k-max", interval_k_max);

    auto* s_logint = sharp->add_subcommand("logint", "log-integral trend of a sampled weight");
    std::string weight_path;
    s_logint->add_option("--weight", weight_path)->required();
    s_logint->add_option("--windows", windows_spec);

    // ---- certify -------------------------------------------------------------------------------
    auto* certify = app.add_subcommand("certify", "type certificates");
    std::string statement, omega_spec = "ones", batch_path;
    double ds_L = 1.0, ds_delta = 1.0, ell = 1.0;
    certify->add_option("--statement", statement)
        ->check(CLI::IsMember({"reference", "zero", "szego", "duffin_schaeffer", "koosis"}));
    certify->add_option("--batch", batch_path,
                        "manifest: [{\"measure\": path, \"statement\": ..., \"params\": {...}}]");
    certify->add_option("--measure", mu_path);
    certify->add_option("--omega", omega_spec, "ones | inv_sq | exp_decay");
    certify->add_option("--L", ds_L);
    certify->add_option("--delta", ds_delta);
    certify->add_option("--ell", ell);
    int koosis_N = 4096;
    certify->add_option("--N-max", koosis_N);

    // ---- sl -----------------------------------------------------------------------------------
    auto* sl = app.add_subcommand("sl", "forward spectral theory");
    std::string potential_path, f_path;
    double sl_a = std::numbers::pi, sl_h = 0.0, sl_lambda = 2.0, sl_x = 1.0;

    auto* sl_omega = sl->add_subcommand("omega", "boundary-value solution");
    sl_omega->add_option("--potential", potential_path)->required();
    sl_omega->add_option("--a", sl_a);
    sl_omega->add_option("--slope", sl_h);
    sl_omega->add_option("--lambda", sl_lambda);
    sl_omega->add_option("--x-max", sl_x);

    auto* sl_bound = sl->add_subcommand("bound", "cosine-comparison envelope");
    sl_bound->add_option("--potential", potential_path)->required();
    sl_bound->add_option("--a", sl_a);
    sl_bound->add_option("--slope", sl_h);
    sl_bound->add_option("--lambda", sl_lambda);
    sl_bound->add_option("--x", sl_x);

    auto* sl_weyl = sl->add_subcommand("weyl", "transform of a compactly supported function");
    sl_weyl->add_option("--potential", potential_path)->required();
    sl_weyl->add_option("--a", sl_a);
    sl_weyl->add_option("--slope", sl_h);
    sl_weyl->add_option("--f", f_path)->required();
    double weyl_lmax = 20.0;
    sl_weyl->add_option("--lambda-max", weyl_lmax);

    auto* sl_pars = sl->add_subcommand("parseval", "norm identity against a spectral measure");
    sl_pars->add_option("--potential", potential_path)->required();
    sl_pars->add_option("--a", sl_a);
    sl_pars->add_option("--slope", sl_h);
    sl_pars->add_option("--measure", mu_path)->required();
    sl_pars->add_option("--f", f_path)->required();

    auto* sl_phi = sl->add_subcommand("phi", "regularized second moment transform");
    sl_phi->add_option("--measure", mu_path)->required();
    double phi_xmax = 3.0;
    sl_phi->add_option("--x-max", phi_xmax);
    std::optional<double> phi_tail;
    double phi_tail_val = 0;
    auto* opt_tail = sl_phi->add_option("--tail-level", phi_tail_val);

    auto* sl_gl = sl->add_subcommand("glcheck", "normalization of the transform at zero");
    sl_gl->add_option("--measure", mu_path)->required();
    sl_gl->add_option("--a", sl_a);
    sl_gl->add_option("--slope", sl_h);
    auto* opt_tail2 = sl_gl->add_option("--tail-level", phi_tail_val);

    auto* sl_pair = sl->add_subcommand("pairing", "distributional transform identity");
    sl_pair->add_option("--measure", mu_path)->required();
    sl_pair->add_option("--f", f_path)->required();

    // global flags remain usable after any subcommand
    const std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* a) {
        a->fallthrough();
        for (auto* s : a->get_subcommands(static_cast<const std::function<bool(CLI::App*)>&>(nullptr)))
            enable_fallthrough(s);
    };
    enable_fallthrough(&app);

    CLI11_PARSE(app, argc, argv);
    ctx.out_dir = out_dir;
    ctx.strict = !parallel;

    try {
        fs::create_directories(ctx.out_dir);
        const auto split_doubles = [](const std::string& s) {
            std::vector<double> out;
            std::istringstream ss(s);
            std::string tok;
            while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
            return out;
        };
        const auto built_in_product = [&](const std::string& name, int K) {
            if (name == "sinc") return CanonicalProduct::sinc_pi(K);
            if (name == "sin") return CanonicalProduct::sin_pi(K);
            return CanonicalProduct::cos_pi(K);
        };

        if (m_growth->parsed()) {
            ctx.command = "measure growth";
            auto mu = load_measure(ctx, "measure", mu_path);
            const auto windows = parse_windows(windows_spec);
            const auto s_grid = split_doubles(s_list);
            ctx.params = {{"windows", windows}, {"s_grid", s_grid}};
            const auto rep = polynomial_growth_exponent(mu, s_grid, windows);
            json entries = json::array();
            for (const auto& e : rep.entries)
                entries.push_back({{"s", e.s}, {"partials", e.partials}, {"trend", to_string(e.trend)}});
            ctx.results["entries"] = entries;
            ctx.results["minimal_s"] = rep.minimal_s ? json(*rep.minimal_s) : json("none");
        } else if (m_major->parsed() || m_equiv->parsed()) {
            auto mu = load_measure(ctx, "measure", mu_path);
            auto nu = load_measure(ctx, "against", nu_path);
            ctx.params = {{"delta", delta}, {"n", maj_n}, {"C", C}};
            if (m_major->parsed()) {
                ctx.command = "measure majorize";
                const auto grid = make_majorization_grid(mu, nu, delta);
                const auto w = majorization_check(mu, nu, delta, maj_n, C, grid);
                ctx.results["holds"] = w.holds();
                ctx.results["violations"] = w.violations;
            } else {
                ctx.command = "measure equiv";
                const auto rep = weak_equivalence_check(mu, nu, delta, maj_n, C);
                ctx.results["equivalent"] = rep.equivalent;
                ctx.results["forward_violations"] = rep.forward.violations;
                ctx.results["backward_violations"] = rep.backward.violations;
            }
        } else if (m_prox->parsed()) {
            ctx.command = "measure proximity";
            auto mu = load_measure(ctx, "measure", mu_path);
            auto nu = load_measure(ctx, "against", nu_path);
            ctx.params = {{"delta", delta}};
            std::vector<double> grid;
            for (double x = 0; x <= mu.truncation_radius(); x += 0.25) grid.push_back(x);
            const auto td = tail_difference(mu, nu, grid);
            ctx.certificates.push_back(proximity_test(td.psi, delta));
            ctx.csv_header = {"lambda", "psi"};
            ctx.csv_columns = {td.grid, td.values};
        } else if (m_imag->parsed()) {
            ctx.command = "measure imagtail";
            auto mu = load_measure(ctx, "measure", mu_path);
            ctx.params = {{"delta", delta}, {"mode", imag_mode}, {"x", imag_x}};
            ctx.certificates.push_back(imag_tail_test(
                mu, delta, imag_mode == "gaussian" ? ImagTailMode::gaussian : ImagTailMode::exponential,
                imag_x));
        } else if (e_eval->parsed()) {
            ctx.command = "entire eval";
            ctx.params = {{"product", product_name}, {"K", K_count}, {"re", eval_re}, {"im", eval_im}};
            const auto F = built_in_product(product_name, K_count);
            const auto v = F.eval({eval_re, eval_im}, F.zero_count(), TailPolicy::pair_log_bound);
            ctx.results["at_zero"] = v.at_zero;
            ctx.results["log_abs"] = v.log_abs;
            ctx.results["value_re"] = v.value().real();
            ctx.results["value_im"] = v.value().imag();
            ctx.results["tail_log_bound"] = v.tail_log_bound;
        } else if (e_krein->parsed()) {
            ctx.command = "entire krein";
            ctx.params = {{"product", product_name}, {"K", K_count}, {"weight_exponent", weight_exponent}};
            const auto F = built_in_product(product_name, K_count);
            const auto rep = krein_sum(F, Weight::power(weight_exponent));
            ctx.results["partials"] = rep.partials;
            ctx.results["trend"] = to_string(rep.trend);
            ctx.certificates.push_back(rep.certificate);
        } else if (e_annih->parsed()) {
            ctx.command = "entire annihilate";
            const double b = std::stod(b_spec);
            ctx.params = {{"product", product_name}, {"K", K_count}, {"b", b}, {"shift", annih_shift}};
            const auto B = built_in_product(product_name, K_count);
            const auto rep = annihilation_residual(B, sinc_sq(b, annih_shift), B.zero_count());
            ctx.results["residual"] = rep.residual;
            ctx.results["tail_bound"] = rep.tail_bound;
            ctx.results["annihilated"] = rep.annihilated;
        } else if (e_count->parsed()) {
            ctx.command = "entire counting";
            auto mu = load_measure(ctx, "points", lambda_path);
            std::vector<double> pts;
            for (const auto& a : mu.real_atoms()) pts.push_back(a.position);
            const auto prof = counting(pts);
            std::vector<double> ts, ns, Ns;
            const double top = std::abs(pts.back());
            for (int i = 1; i <= 128; ++i) {
                const double t = top * i / 128.0;
                ts.push_back(t);
                ns.push_back(prof.n_at(t));
                Ns.push_back(prof.N_at(t));
            }
            ctx.csv_header = {"t", "n", "N"};
            ctx.csv_columns = {ts, ns, Ns};
            ctx.results["points"] = pts.size();
        } else if (e_excl->parsed()) {
            ctx.command = "entire exclude";
            auto mu = load_measure(ctx, "points", lambda_path);
            std::vector<double> pts;
            for (const auto& a : mu.real_atoms()) pts.push_back(a.position);
            const auto A = split_doubles(A_list_spec);
            ctx.params = {{"c", exclude_c}, {"A_list", A}, {"R_max", R_max}};
            const auto rep = krein_exclusion(pts, exclude_c, A, R_max);
            ctx.certificates.push_back(rep.certificate);
        } else if (e_shift->parsed()) {
            ctx.command = "entire shift";
            const double rate = std::stod(shift_rate);
            ctx.params = {{"product", product_name}, {"K", K_count}, {"delta", shift_delta},
                          {"M", shift_M}, {"rate", rate}};
            const auto B = built_in_product(product_name, K_count);
            std::map<double, double> targets;
            for (double z : B.positive_zeros()) targets[z] = z + std::exp(-rate * z);
            const auto rep = shift_zeros(B, targets, shift_M, shift_delta);
            ctx.results["max_ratio_deviation"] = rep.max_ratio_deviation;
            ctx.results["max_deviation_coeff"] = rep.max_deviation_coeff;
            ctx.results["decay_slope"] = rep.decay_fit.slope;
        } else if (e_quads->parsed()) {
            ctx.command = "entire quads";
            ctx.params = {{"eta", eta_const}, {"K_max", quads_K}};
            const auto res = build_four_node_system([&](int) { return eta_const; }, quads_K);
            ctx.results["min_derivative_ratio"] = res.min_derivative_ratio;
            ctx.results["zeros"] = res.G.zero_count();
            json quads = json::array();
            for (const auto& q : res.nodes.quads) quads.push_back({q.a, q.b, q.c, q.d});
            ctx.results["quads_head"] = json(std::vector<json>(
                quads.begin(), quads.begin() + std::min<size_t>(4, quads.size())));
        } else if (w_transform->parsed()) {
            ctx.command = "weights transform";
            ctx.params = {{"delta", wt_delta}, {"p", wt_p}, {"range", wt_range}, {"base", wt_base}};
            Weight base = Weight::constant(1.0);
            if (wt_base.rfind("constant:", 0) == 0)
                base = Weight::constant(std::stod(wt_base.substr(9)));
            else if (wt_base.rfind("power:", 0) == 0)
                base = Weight::power(std::stod(wt_base.substr(6)));
            else if (wt_base == "integers") {
                std::vector<double> sup;
                for (int n = -static_cast<int>(wt_range); n <= static_cast<int>(wt_range); ++n)
                    sup.push_back(n);
                base = Weight::discrete(sup, [](double) { return 1.0; });
            } else
                throw validation_error("weights transform: unknown base '" + wt_base + "'");
            std::vector<double> grid(wt_samples);
            for (int i = 0; i < wt_samples; ++i)
                grid[i] = -wt_range + 2.0 * wt_range * i / (wt_samples - 1);
            const auto res = weight_transform(base, wt_delta, wt_p, grid);
            ctx.csv_header = {"x", "W"};
            ctx.csv_columns = {res.grid, res.values};
            ctx.results["samples"] = res.values.size();
        } else if (w_bakan->parsed()) {
            ctx.command = "weights bakan";
            ctx.params = {{"n", bakan_n}, {"K", bakan_K}};
            const auto f = [](double x) { return std::complex<double>(1.0 / (1.0 + x * x), 0.0); };
            std::vector<BakanApproximant> hs;
            for (int k = 1; k <= bakan_K; ++k) {
                hs.push_back({[f, k](double x) {
                                  return f(x) / std::complex<double>(x, -1.0) +
                                         std::pow(8.0, -k) * std::pow(1.0 + std::abs(x), -k - 1.0);
                              },
                              std::pow(8.0, -k)});
            }
            std::vector<double> grid;
            for (double x = -1000; x <= 1000; x += 0.5) grid.push_back(x);
            const std::vector<double> s_values = {1.0, 2.0};
            const auto res = bakan_weight(f, hs, bakan_n, bakan_K, grid, s_values);
            json chain = json::array();
            for (const auto& e : res.chain)
                chain.push_back({{"s", e.s}, {"k", e.k}, {"seminorm", e.seminorm}, {"ok", e.within_bound}});
            ctx.results["chain"] = chain;
        } else if (n_check->parsed()) {
            ctx.command = "nazarov check";
            ctx.record_input("diffeo", diffeo_path);
            const auto X = diffeo_from_json(load_json_file(diffeo_path));
            std::vector<double> tg;
            for (int i = -400; i <= 400; ++i) tg.push_back(t_max * i / 400.0);
            const auto rep = gamma_check(X, tg, 4);
            ctx.certificates.push_back(rep.certificate);
        } else if (n_build->parsed()) {
            ctx.command = "nazarov build";
            ctx.record_input("diffeo", diffeo_path);
            const auto X = diffeo_from_json(load_json_file(diffeo_path));
            const auto mu = build_measure(X, naz_c, naz_K);
            write_json_atomic(ctx.out_dir / "measure.json", measure_to_json(mu));
            ctx.results["atoms"] = mu.real_atoms().size();
        } else if (n_verify->parsed()) {
            ctx.command = "nazarov verify";
            ctx.record_input("diffeo", diffeo_path);
            ctx.params = {{"c", naz_c}, {"K", naz_K}, {"t_max", t_max},
                          {"win_a", win_a}, {"win_b", win_b}};
            const auto X = diffeo_from_json(load_json_file(diffeo_path));
            const auto mu = build_measure(X, naz_c, naz_K);
            const SchwartzWindow window(win_a, win_b);
            std::vector<double> tg;
            for (double t = 0; t <= t_max; t += t_max / 400.0) tg.push_back(t);
            const auto rep = poisson_decay_test(mu, window, tg, naz_c);
            ctx.results["max_abs_D"] = rep.max_abs_D;
            ctx.results["slope"] = rep.loglog_fit.slope;
            ctx.results["superpolynomial_consistent"] = rep.superpolynomial_consistent;
            std::vector<double> absD(rep.D.size());
            for (size_t i = 0; i < rep.D.size(); ++i) absD[i] = std::abs(rep.D[i]);
            ctx.csv_header = {"t", "D", "absD"};
            ctx.csv_columns = {rep.t, rep.D, absD};
        } else if (n_stable->parsed()) {
            ctx.command = "nazarov stable";
            ctx.record_input("diffeo", diffeo_path);
            const auto X = diffeo_from_json(load_json_file(diffeo_path));
            const auto A = split_doubles(A_list_spec);
            ctx.params = {{"c", naz_c}, {"R_max", R_max}, {"A_list", A}};
            const auto rep = stable_orthogonality_certificate(X, naz_c, R_max, A);
            ctx.certificates.push_back(rep.certificate);
        } else if (s_wpair->parsed()) {
            ctx.command = "sharpness weightpair";
            ctx.params = {{"eps", eps_spec}, {"n_max", pair_n_max}};
            const auto eps = eps_spec == "inverse_log" ? EpsilonRate::inverse_log()
                                                       : EpsilonRate::power(std::stod(eps_spec));
            const auto res = build_weight_pair(eps, pair_n_max);
            json steps = json::array();
            for (const auto& s : res.f.steps)
                steps.push_back({{"n", s.n}, {"a", s.a}, {"b", s.b}, {"gamma", s.gamma},
                                 {"int_main", s.int_main}, {"int_head", s.int_head},
                                 {"int_tail", s.int_tail}, {"cap_integral", s.cap_integral}});
            ctx.results["steps"] = steps;
            ctx.results["divergence_partials"] = res.divergence_partials;
            ctx.results["gamma_sum"] = res.gamma_sum;
            std::vector<double> cn, ca, cb, cg, cm;
            for (const auto& s : res.f.steps) {
                cn.push_back(s.n);
                ca.push_back(s.a);
                cb.push_back(s.b);
                cg.push_back(s.gamma);
                cm.push_back(s.int_main);
            }
            ctx.csv_header = {"n", "a", "b", "gamma", "int_main"};
            ctx.csv_columns = {cn, ca, cb, cg, cm};
        } else if (s_intervals->parsed()) {
            ctx.command = "sharpness intervals";
            ctx.params = {{"eps", eps_spec}, {"k_max", interval_k_max}};
            const auto eps = eps_spec == "inverse_log" ? EpsilonRate::inverse_log()
                                                       : EpsilonRate::power(std::stod(eps_spec));
            const auto res = build_interval_system(eps, interval_k_max);
            json terms = json::array();
            for (const auto& t : res.terms)
                terms.push_back({{"k", t.k}, {"log_y", t.log_y}, {"gamma", t.gamma},
                                 {"quad_identity", t.quad_identity}, {"ratio_bound", t.ratio_bound}});
            ctx.results["terms"] = terms;
            ctx.results["gamma_cauchy"] = res.gamma_cauchy;
        } else if (s_pairs->parsed()) {
            ctx.command = "sharpness pairs";
            ctx.params = {{"eps", eps_spec}, {"K_max", pairs_K}};
            const auto eps = eps_spec == "inverse_log" ? EpsilonRate::inverse_log()
                                                       : EpsilonRate::power(std::stod(eps_spec));
            const auto intervals = build_interval_system(eps, interval_k_max);
            const auto res = build_paired_nodes(eps, pairs_K, intervals);
            ctx.results["set_A_size"] = res.set_A.size();
            ctx.results["set_B"] = res.set_B;
            ctx.results["pairing_ok"] = res.pairing_ok;
            ctx.results["min_derivative_ratio"] = res.quads.min_derivative_ratio;
            json ann = json::array();
            for (const auto& e : res.annihilation)
                ann.push_back({{"name", e.name}, {"type", e.type},
                               {"residual", e.report.residual}, {"annihilated", e.report.annihilated}});
            ctx.results["annihilation"] = ann;
            const auto unit_measure = [&](const std::vector<double>& pts) {
                std::vector<Atom> atoms;
                for (double l : pts) atoms.push_back({l, 1.0});
                return measure_to_json(
                    SpectralMeasure::from_atoms(std::move(atoms), res.lambda.back() + 1.0, true));
            };
            write_json_atomic(ctx.out_dir / "lambda.json", unit_measure(res.lambda));
            write_json_atomic(ctx.out_dir / "lambda_star.json", unit_measure(res.lambda_star));
            std::vector<double> px, py, pbound;
            for (const auto& p : res.pairs) {
                px.push_back(p.x);
                py.push_back(p.y);
                pbound.push_back(p.bound);
            }
            ctx.csv_header = {"kept", "dropped", "bound"};
            ctx.csv_columns = {px, py, pbound};
        } else if (s_logint->parsed()) {
            ctx.command = "sharpness logint";
            ctx.record_input("weight", weight_path);
            const json wj = load_json_file(weight_path);
            const auto grid = wj.at("grid").get<std::vector<double>>();
            const auto values = wj.at("values").get<std::vector<double>>();
            const Weight W = Weight::from_samples(grid, values, wj.value("infinity_outside", false));
            const auto windows = parse_windows(windows_spec);
            const auto rep = log_integral_report(
                [&](double x) {
                    const double w = W(x);
                    return w > 0 ? -std::log(w) : 700.0;
                },
                windows);
            ctx.results["partials"] = rep.partials;
            ctx.results["verdict"] = to_string(rep.verdict);
        } else if (certify->parsed()) {
            const auto run_statement = [&](const std::string& stmt,
                                           const std::string& measure_file, double L,
                                           double delta_floor, double step, const std::string& om,
                                           int n_max) {
                if (stmt == "reference") {
                    ctx.certificates.push_back(
                        reference_type(ReferenceModel::arithmetic_progression, step));
                } else if (stmt == "zero") {
                    auto mu = load_measure(ctx, "measure", measure_file);
                    const auto windows = geometric_windows(1.0, 2.0, 8);
                    ctx.certificates.push_back(zero_type_certificate(
                        mu, [](double x) { return std::exp(std::abs(x) / 2.0); }, windows));
                } else if (stmt == "szego") {
                    auto mu = load_measure(ctx, "measure", measure_file);
                    if (!mu.real_density()) throw validation_error("szego needs a density measure");
                    const auto windows = geometric_windows(mu.truncation_radius() / 128.0, 2.0, 8);
                    ctx.certificates.push_back(szego_infinite_type(*mu.real_density(), windows));
                } else if (stmt == "duffin_schaeffer") {
                    auto mu = load_measure(ctx, "measure", measure_file);
                    std::vector<double> grid;
                    const double R = mu.truncation_radius() / 2.0;
                    for (double x = -R; x <= R; x += L / 4.0) grid.push_back(x);
                    ctx.certificates.push_back(duffin_schaeffer(mu, L, delta_floor, grid));
                } else if (stmt == "koosis") {
                    std::function<double(int)> omega = [](int) { return 1.0; };
                    if (om == "inv_sq")
                        omega = [](int n) { return 1.0 / (1.0 + static_cast<double>(n) * n); };
                    else if (om == "exp_decay")
                        omega = [](int n) { return std::exp(-std::abs(n)); };
                    ctx.certificates.push_back(koosis_lattice(omega, n_max));
                } else {
                    throw validation_error("certify: unknown statement '" + stmt + "'");
                }
            };
            if (!batch_path.empty()) {
                ctx.command = "certify batch";
                ctx.record_input("manifest", batch_path);
                const json manifest = load_json_file(batch_path);
                if (!manifest.is_array())
                    throw validation_error("certify batch: manifest must be an array");
                for (const auto& entry : manifest) {
                    const json p = entry.value("params", json::object());
                    run_statement(entry.at("statement").get<std::string>(),
                                  entry.value("measure", std::string{}),
                                  p.value("L", ds_L), p.value("delta", ds_delta),
                                  p.value("ell", ell), p.value("omega", omega_spec),
                                  p.value("N_max", koosis_N));
                }
            } else {
                if (statement.empty())
                    throw validation_error("certify: need --statement or --batch");
                ctx.command = "certify " + statement;
                ctx.params = {{"omega", omega_spec}, {"N_max", koosis_N}, {"L", ds_L},
                              {"delta", ds_delta}, {"ell", ell}};
                run_statement(statement, mu_path, ds_L, ds_delta, ell, omega_spec, koosis_N);
            }
        } else if (sl_omega->parsed()) {
            ctx.command = "sl omega";
            ctx.record_input("potential", potential_path);
            SLProblem pb{sl_a, potential_from_json(load_json_file(potential_path)), sl_h};
            ctx.params = {{"a", sl_a}, {"h", sl_h}, {"lambda", sl_lambda}};
            std::vector<double> xg;
            for (double x = 0; x <= sl_x; x += sl_x / 256.0) xg.push_back(x);
            const auto om = solve_omega(pb, sl_lambda, xg);
            std::vector<double> re(om.size());
            for (size_t i = 0; i < om.size(); ++i) re[i] = om[i].real();
            ctx.csv_header = {"x", "omega"};
            ctx.csv_columns = {xg, re};
        } else if (sl_bound->parsed()) {
            ctx.command = "sl bound";
            ctx.record_input("potential", potential_path);
            SLProblem pb{sl_a, potential_from_json(load_json_file(potential_path)), sl_h};
            const auto rep = omega_bound_check(pb, sl_lambda, sl_x);
            ctx.results["lhs"] = rep.lhs;
            ctx.results["rhs"] = rep.rhs;
            ctx.results["slack"] = rep.slack;
            ctx.results["vacuous"] = rep.vacuous;
            ctx.results["holds"] = rep.holds;
        } else if (sl_weyl->parsed()) {
            ctx.command = "sl weyl";
            ctx.record_input("potential", potential_path);
            SLProblem pb{sl_a, potential_from_json(load_json_file(potential_path)), sl_h};
            double lo = 0, hi = 0;
            const auto f = load_bump(ctx, f_path, lo, hi);
            std::vector<double> lg;
            for (double l = 0; l <= weyl_lmax; l += 0.25) lg.push_back(l);
            const auto w = weyl_transform(f, hi, pb, lg);
            ctx.csv_header = {"lambda", "transform"};
            ctx.csv_columns = {lg, w};
        } else if (sl_pars->parsed()) {
            ctx.command = "sl parseval";
            ctx.record_input("potential", potential_path);
            SLProblem pb{sl_a, potential_from_json(load_json_file(potential_path)), sl_h};
            auto mu = load_measure(ctx, "measure", mu_path);
            double lo = 0, hi = 0;
            const auto f = load_bump(ctx, f_path, lo, hi);
            const auto rep = parseval_check(f, hi, pb, mu);
            ctx.results["norm_f_sq"] = rep.norm_f_sq;
            ctx.results["norm_transform_sq"] = rep.norm_transform_sq;
            ctx.results["relative_error"] = rep.relative_error;
            ctx.results["tail_bound"] = rep.tail_bound;
        } else if (sl_phi->parsed()) {
            ctx.command = "sl phi";
            auto mu = load_measure(ctx, "measure", mu_path);
            if (opt_tail->count()) phi_tail = phi_tail_val;
            std::vector<double> xg;
            for (double x = 0; x <= phi_xmax; x += phi_xmax / 512.0) xg.push_back(x);
            const auto phi = phi_transform(mu, xg, phi_tail);
            ctx.csv_header = {"x", "phi"};
            ctx.csv_columns = {phi.grid, phi.values};
        } else if (sl_gl->parsed()) {
            ctx.command = "sl glcheck";
            auto mu = load_measure(ctx, "measure", mu_path);
            if (opt_tail2->count()) phi_tail = phi_tail_val;
            std::vector<double> xg;
            for (double x = 0; x <= 1e-2; x += 1e-3) xg.push_back(x);
            for (double x = 2e-2; x <= 1.0; x += 1e-2) xg.push_back(x);
            const auto phi = phi_transform(mu, xg, phi_tail);
            const auto rep = gl_check(phi, sl_h, sl_a);
            ctx.certificates.push_back(rep.certificate);
            ctx.results["inferred_h"] = rep.inferred_h;
        } else if (sl_pair->parsed()) {
            ctx.command = "sl pairing";
            auto mu = load_measure(ctx, "measure", mu_path);
            double lo = 0, hi = 0;
            const auto f = load_bump(ctx, f_path, lo, hi);
            const std::vector<double> sigmas = {1e-2, 5e-3, 2.5e-3};
            const auto rep = pairing_test(mu, f, std::max(std::abs(lo), std::abs(hi)), sigmas);
            ctx.results["lhs"] = rep.lhs;
            ctx.results["rhs"] = rep.rhs;
            ctx.results["rhs_extrapolated"] = rep.rhs_extrapolated;
            ctx.results["discrepancy"] = rep.discrepancy;
        } else {
            std::cerr << "no subcommand selected\n";
            return 2;
        }
        return ctx.finalize(require_verdict);
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const grid_error& e) {
        std::cerr << "grid error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
