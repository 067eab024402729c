#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "typelab/certificate.hpp"
#include "typelab/io.hpp"

using namespace typelab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const auto p = fs::temp_directory_path() / ("typelab_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CLI_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("measure files round-trip to equal values") {
    PiecewiseDensity d{{-2.0, 0.0, 2.0}, {0.25, 1.0, 0.25}};
    std::vector<Atom> atoms = {{-1.5, 0.5}, {0.0, 2.0}, {1.5, 0.5}};
    std::vector<ImagAtom> imag = {{0.7, 0.125}};
    const SpectralMeasure mu(atoms, d, imag, true, 10.0);

    const auto j = measure_to_json(mu);
    const auto back = measure_from_json(j);
    REQUIRE(back.real_atoms().size() == atoms.size());
    for (size_t i = 0; i < atoms.size(); ++i) {
        CHECK(back.real_atoms()[i].position == atoms[i].position);
        CHECK(back.real_atoms()[i].mass == atoms[i].mass);
    }
    REQUIRE(back.real_density().has_value());
    CHECK(back.real_density()->grid == d.grid);
    CHECK(back.real_density()->values == d.values);
    CHECK(back.imag_atoms()[0].height == 0.7);
    CHECK(back.symmetric());
    CHECK(back.truncation_radius() == 10.0);

    // byte-stable through a serialize/parse/serialize cycle
    CHECK(measure_to_json(back).dump() == j.dump());
}

TEST_CASE("generator shorthands expand") {
    const auto lat = measure_from_json({{"lattice", {{"spacing", 0.5}, {"mass", 2.0}, {"count", 3}}}});
    CHECK(lat.real_atoms().size() == 7);
    CHECK(lat.real_atoms()[0].position == -1.5);
    const auto leb = measure_from_json({{"lebesgue", {{"level", 0.5}, {"radius", 7.0}}}});
    REQUIRE(leb.real_density().has_value());
    CHECK(leb.real_density()->values[0] == 0.5);
}

TEST_CASE("diffeo and potential files round-trip") {
    const auto X = diffeo_from_json({{"family", "arcsinh_shift"}, {"beta", 0.5}});
    CHECK(X.family_name() == "arcsinh_shift");
    CHECK(diffeo_to_json(X)["beta"] == 0.5);
    CHECK_THROWS(diffeo_from_json({{"family", "unknown"}}));

    const auto q = potential_from_json({{"kind", "constant"}, {"value", 1.5}});
    CHECK(q(3.0) == 1.5);
    const auto j = potential_to_json(q);
    CHECK(j["kind"] == "constant");
}

TEST_CASE("certificates serialize with extended reals") {
    Certificate c;
    c.statement = "demo";
    c.verdict = "holds";
    c.value = std::numeric_limits<double>::infinity();
    c.evidence["partials"] = {1.0, 2.0};
    const auto j = c.to_json();
    const auto back = Certificate::from_json(j);
    CHECK(std::isinf(back.value));
    CHECK(back.verdict == "holds");
    CHECK(back.evidence["partials"][1] == 2.0);
}

TEST_CASE("atomic writes land complete") {
    const auto dir = temp_dir("atomic");
    write_json_atomic(dir / "x.json", {{"k", 1}});
    CHECK(load_json_file(dir / "x.json")["k"] == 1);
    CHECK_FALSE(fs::exists(dir / "x.json.tmp"));
    write_csv_atomic(dir / "x.csv", {"a", "b"}, {{1.0, 2.0}, {3.0}});
    const auto text = slurp(dir / "x.csv");
    CHECK(text.find("a,b") == 0);
    fs::remove_all(dir);
}

TEST_CASE("cli: certify emits a deterministic report") {
    const auto dir = temp_dir("cli_certify");
    const std::string out = dir.string();
    REQUIRE(run_cli("certify --statement koosis --omega ones --out " + out) == 0);
    const auto rep = load_json_file(dir / "report.json");
    CHECK(rep["certificates"][0]["verdict"] == "holds");
    CHECK(rep["defaults"].contains("defaults_version"));
    CHECK(rep["mode"] == "strict");
    const std::string first = slurp(dir / "report.json");

    REQUIRE(run_cli("certify --statement koosis --omega ones --out " + out) == 0);
    CHECK(slurp(dir / "report.json") == first);  // byte-identical rerun
    CHECK(fs::exists(dir / "run.log"));
    fs::remove_all(dir);
}

TEST_CASE("cli: nazarov pipeline against a diffeo file") {
    const auto dir = temp_dir("cli_nazarov");
    write_json_atomic(dir / "arcsinh.json", {{"family", "arcsinh_shift"}, {"beta", 0.5}});
    const std::string out = (dir / "run").string();
    REQUIRE(run_cli("nazarov verify --diffeo " + (dir / "arcsinh.json").string() +
                    " --c 1 --K 2000 --t-max 400 --out " + out) == 0);
    const auto rep = load_json_file(dir / "run" / "report.json");
    CHECK(rep["results"]["superpolynomial_consistent"] == true);
    CHECK(fs::exists(dir / "run" / "data.csv"));
    // emitted measure reloads to an equal value
    REQUIRE(run_cli("nazarov build --diffeo " + (dir / "arcsinh.json").string() +
                    " --c 1 --K 50 --out " + out) == 0);
    const auto mu = measure_from_json(load_json_file(dir / "run" / "measure.json"));
    CHECK(mu.real_atoms().size() == 101);
    CHECK(measure_to_json(measure_from_json(measure_to_json(mu))).dump() ==
          measure_to_json(mu).dump());
    fs::remove_all(dir);
}

TEST_CASE("cli: sl parseval pipeline") {
    const auto dir = temp_dir("cli_sl");
    write_json_atomic(dir / "zero.json", {{"kind", "zero"}});
    write_json_atomic(dir / "bump.json", {{"kind", "bump"}, {"lo", 0.3}, {"hi", 2.8}});
    write_json_atomic(dir / "lat.json",
                      {{"lattice", {{"spacing", 1.0}, {"mass", 1.0 / 3.14159265358979}, {"count", 256}}}});
    const std::string out = (dir / "run").string();
    REQUIRE(run_cli("sl parseval --potential " + (dir / "zero.json").string() +
                    " --a 3.14159265 --measure " + (dir / "lat.json").string() + " --f " +
                    (dir / "bump.json").string() + " --out " + out) == 0);
    const auto rep = load_json_file(dir / "run" / "report.json");
    CHECK(rep["results"]["relative_error"].get<double>() <= 1e-8);
    fs::remove_all(dir);
}

TEST_CASE("cli: exit codes") {
    const auto dir = temp_dir("cli_exit");
    // missing input file -> validation failure
    CHECK(run_cli("measure growth --measure " + (dir / "nope.json").string()) == 2);
    CHECK(run_cli("certify --statement reference --ell 1 --out " + (dir / "r").string()) == 0);
    // inconclusive-only with --require-verdict -> 3: a proximity run whose
    // mass mismatch persists to the truncation edge cannot settle
    write_json_atomic(dir / "a.json",
                      {{"lattice", {{"spacing", 1.0}, {"mass", 1.0}, {"count", 50}}}});
    write_json_atomic(dir / "b.json",
                      {{"lattice", {{"spacing", 1.0}, {"mass", 2.0}, {"count", 50}}}});
    CHECK(run_cli("measure proximity --measure " + (dir / "a.json").string() + " --against " +
                  (dir / "b.json").string() + " --delta 0.5 --require-verdict --out " +
                  (dir / "p").string()) == 3);
    fs::remove_all(dir);
}
