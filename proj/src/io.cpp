#include "typelab/io.hpp"

#include <fstream>
#include <sstream>

#include "typelab/errors.hpp"
#include "typelab/numeric.hpp"

namespace typelab {

nlohmann::json measure_to_json(const SpectralMeasure& mu) {
    nlohmann::json j;
    j["symmetric"] = mu.symmetric();
    j["truncation_radius"] = mu.truncation_radius();
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : mu.real_atoms()) atoms.push_back({a.position, a.mass});
    j["real_atoms"] = atoms;
    if (mu.real_density()) {
        j["real_density"] = {{"grid", mu.real_density()->grid},
                             {"values", mu.real_density()->values}};
    }
    nlohmann::json imag = nlohmann::json::array();
    for (const auto& a : mu.imag_atoms()) imag.push_back({a.height, a.mass});
    j["imag_atoms"] = imag;
    return j;
}

SpectralMeasure measure_from_json(const nlohmann::json& j) {
    if (j.contains("lattice")) {
        const auto& l = j.at("lattice");
        return SpectralMeasure::lattice(l.at("spacing").get<double>(),
                                        l.at("mass").get<double>(), l.at("count").get<int>());
    }
    if (j.contains("lebesgue")) {
        const auto& l = j.at("lebesgue");
        return SpectralMeasure::lebesgue(l.at("level").get<double>(),
                                         l.at("radius").get<double>());
    }
    std::vector<Atom> atoms;
    if (j.contains("real_atoms"))
        for (const auto& a : j.at("real_atoms")) atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    std::optional<PiecewiseDensity> density;
    if (j.contains("real_density") && !j.at("real_density").is_null()) {
        PiecewiseDensity d;
        d.grid = j.at("real_density").at("grid").get<std::vector<double>>();
        d.values = j.at("real_density").at("values").get<std::vector<double>>();
        density = std::move(d);
    }
    std::vector<ImagAtom> imag;
    if (j.contains("imag_atoms"))
        for (const auto& a : j.at("imag_atoms")) imag.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    return SpectralMeasure(std::move(atoms), std::move(density), std::move(imag),
                           j.value("symmetric", false), j.at("truncation_radius").get<double>());
}

nlohmann::json diffeo_to_json(const GammaDiffeo& X) {
    return {{"family", X.family_name()}, {"beta", X.beta()}};
}

GammaDiffeo diffeo_from_json(const nlohmann::json& j) {
    const std::string fam = j.at("family").get<std::string>();
    const double beta = j.value("beta", 0.0);
    if (fam == "identity") return GammaDiffeo::identity();
    if (fam == "arctan_shift") return GammaDiffeo::arctan_shift(beta);
    if (fam == "arcsinh_shift") return GammaDiffeo::arcsinh_shift(beta);
    throw validation_error("diffeo: unknown family '" + fam + "'");
}

nlohmann::json potential_to_json(const Potential& q) {
    switch (q.kind) {
        case Potential::Kind::zero: return {{"kind", "zero"}};
        case Potential::Kind::constant: return {{"kind", "constant"}, {"value", q.value}};
        default: return {{"kind", "sampled"}, {"grid", q.grid}, {"values", q.values}};
    }
}

Potential potential_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return Potential::zero();
    if (kind == "constant") return Potential::constant(j.at("value").get<double>());
    if (kind == "sampled")
        return Potential::sampled(j.at("grid").get<std::vector<double>>(),
                                  j.at("values").get<std::vector<double>>());
    throw validation_error("potential: unknown kind '" + kind + "'");
}

nlohmann::json weight_samples_to_json(const std::vector<double>& grid,
                                      const std::vector<double>& values,
                                      bool infinity_outside) {
    return {{"grid", grid}, {"values", values}, {"infinity_outside", infinity_outside}};
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw validation_error("cannot parse " + path.string() + ": " + e.what());
    }
    return j;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw error("cannot write " + tmp);
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text_atomic(path, j.dump(2) + "\n");
}

void write_csv_atomic(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
    std::ostringstream out;
    out.precision(17);
    for (size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << "\n";
    size_t rows = 0;
    for (const auto& col : columns) rows = std::max(rows, col.size());
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < columns.size(); ++c) {
            if (c) out << ",";
            if (r < columns[c].size()) out << columns[c][r];
        }
        out << "\n";
    }
    write_text_atomic(path, out.str());
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    return fnv1a_hex(std::span<const char>(bytes.data(), bytes.size()));
}

nlohmann::json defaults_json() {
    return {
        {"defaults_version", "1.0"},
        {"trend_rule", "factor-2 decay/growth across the last three window increments"},
        {"window_factor", 4.0},
        {"window_count", 8},
        {"majorization_grid_spacing", "e^{-delta |x|}/4 around every support point"},
        {"quadrature_local_tolerance", 1e-12},
        {"ode_tolerance_per_unit_length", 1e-10},
        {"poisson_fit_range", {20.0, 500.0}},
        {"poisson_N_target", 4.0},
        {"m_regularization_sigmas", {1e-2, 5e-3, 2.5e-3}},
        {"annihilation_tolerance", 1e-6},
    };
}

} // namespace typelab
