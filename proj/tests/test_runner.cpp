#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nls/config.hpp"
#include "nls/errors.hpp"
#include "nls/runner.hpp"

using namespace nls;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "nls_test_runner" / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExperimentConfig cfg_from(const std::string& text, const fs::path& out) {
    ExperimentConfig cfg = parse_config_text(text, "test");
    cfg.out_dir = out.string();
    return cfg;
}

} // namespace

TEST_CASE("constants mode writes the scale-invariant table") {
    fs::path out = fresh_dir("constants");
    ExperimentConfig cfg = cfg_from("mode = constants\n[problem]\nd = 1\np = 2\n", out);
    run_experiment(cfg);

    json j = json::parse(slurp(out / "constants.json"));
    CHECK(j["mode"] == "constants");
    CHECK(j["dim"] == 1);
    CHECK(j["a_star"].get<double>() == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(j["grad_sq"].get<double>() == doctest::Approx(1.2).epsilon(1e-9));
    CHECK(j["mass_p1"].get<double>() == doctest::Approx(7.2).epsilon(1e-9));
    CHECK(j["c_gn"].get<double>() == doctest::Approx(1.3650604313545334).epsilon(1e-12));
    CHECK(j["lambda"].get<double>() == 0.3);
    CHECK(j["pohozaev_residual"].get<double>() < 1e-8);

    // The stamped hash matches the config it came from.
    char expect[32];
    std::snprintf(expect, sizeof expect, "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    CHECK(j["config_hash"] == expect);
}

TEST_CASE("soliton mode writes profile table and summary") {
    fs::path out = fresh_dir("soliton");
    run_experiment(cfg_from("mode = soliton\n[problem]\nd = 1\np = 2\n", out));

    std::string csv = slurp(out / "soliton.csv");
    CHECK(csv.rfind("# nlslab config=", 0) == 0);
    CHECK(csv.find("# columns: r,w") != std::string::npos);

    json j = json::parse(slurp(out / "soliton.json"));
    CHECK(j["w0"].get<double>() == doctest::Approx(1.5).epsilon(1e-8));
    CHECK(j["ode_residual"].get<double>() < 1e-9);
}

TEST_CASE("minimize mode reports consistent multipliers") {
    fs::path out = fresh_dir("minimize");
    run_experiment(cfg_from("mode = minimize\n"
                            "[problem]\nd = 1\np = 2\nrho = 4\n"
                            "[potential]\nfamily = power\ncenter = 0\ndegree = 2\n"
                            "[grid]\nL = 8\nn = 801\n",
                            out));

    json j = json::parse(slurp(out / "minimize.json"));
    CHECK(j["iterations"].get<long long>() > 0);
    CHECK(j["grad_residual"].get<double>() <= 1e-8);
    double mu = j["mu"].get<double>();
    double mu_r = j["mu_rayleigh"].get<double>();
    CHECK(mu == doctest::Approx(mu_r).epsilon(1e-3));
    CHECK(j["eigen_residual"].get<double>() < 1e-6);

    // Midline table: one sample per grid point plus the two header lines.
    std::string csv = slurp(out / "field.csv");
    long lines = static_cast<long>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(lines == 801 + 2);
}

TEST_CASE("sweep mode is deterministic byte for byte") {
    fs::path out1 = fresh_dir("sweep1");
    fs::path out2 = fresh_dir("sweep2");
    std::string text =
        "mode = sweep\nseed = 3\n[problem]\nd = 1\np = 2\nrho_list = 5, 8\n";
    run_experiment(cfg_from(text, out1));
    run_experiment(cfg_from(text, out2));

    for (const char* name : {"sweep.csv", "sweep.json", "plot_energy.csv", "plot_distance.csv"}) {
        INFO(name);
        CHECK(slurp(out1 / name) == slurp(out2 / name));
    }

    // Flat sweep: energies track the explicit zero-potential value.
    json j = json::parse(slurp(out1 / "sweep.json"));
    REQUIRE(j["entries"].size() == 2);
    for (const auto& e : j["entries"]) {
        double en = e["energy"].get<double>();
        double te = e["tilde_e"].get<double>();
        CHECK(std::abs(en - te) < 5e-3 * std::abs(te));
    }
}

TEST_CASE("probe mode finds one basin for a single well") {
    fs::path out = fresh_dir("probe");
    run_experiment(cfg_from("mode = probe\nseed = 7\n"
                            "[problem]\nd = 1\np = 2\nrho = 4\n"
                            "[potential]\nfamily = power\ncenter = 0\ndegree = 2\n"
                            "[grid]\nL = 8\nn = 801\n"
                            "[probe]\nn_inits = 3\n",
                            out));

    json j = json::parse(slurp(out / "probe.json"));
    REQUIRE(j["runs"].size() == 3);
    CHECK(j["n_clusters"] == 1);
    CHECK(j["max_distance"].get<double>() < 1e-6);
    CHECK(j["energy_spread"].get<double>() < 1e-9);
    for (const auto& r : j["runs"]) CHECK(r["cluster"] == 0);
}

TEST_CASE("run_experiment validates before touching the filesystem") {
    fs::path out = fresh_dir("invalid");
    ExperimentConfig cfg = cfg_from("mode = minimize\n", out);
    CHECK_THROWS_AS(run_experiment(cfg), config_error);
    CHECK(!fs::exists(out));
}
