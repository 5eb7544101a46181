#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "nvep/phonon_rates.hpp"
#include "oracles.hpp"

#ifndef NVEP_CLI_PATH
#error "NVEP_CLI_PATH must point at the CLI binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path case_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "nvep_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd =
        std::string(NVEP_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

int run_cli(const std::string& args) {
    static int n = 0;
    const fs::path dir = fs::temp_directory_path() / "nvep_cli_tests" / "logs";
    fs::create_directories(dir);
    return run_cli(args, dir / ("log_" + std::to_string(n++) + ".txt"));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// One numeric column of a CSV produced by the CLI (0-based index).
std::vector<double> csv_column(const fs::path& path, size_t col,
                               std::string* header = nullptr) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::vector<double> out;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (first) {
            if (header)
                *header = line;
            first = false;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        for (size_t i = 0; std::getline(ss, cell, ','); ++i)
            if (i == col)
                out.push_back(std::stod(cell));
    }
    return out;
}

json load_json(const fs::path& path) { return json::parse(read_file(path)); }

} // namespace

TEST_CASE("rates runs are deterministic") {
    const fs::path dir = case_dir("rates_determinism");
    const std::string args = "rates --tmin 295 --tmax 350 --step 5 --out ";
    REQUIRE(run_cli(args + (dir / "a").string()) == 0);
    REQUIRE(run_cli(args + (dir / "b").string()) == 0);

    const std::string csv = read_file(dir / "a" / "rates.csv");
    CHECK(csv == read_file(dir / "b" / "rates.csv"));
    CHECK(read_file(dir / "a" / "rates.svg").find("</svg>") != std::string::npos);
    CHECK(load_json(dir / "a" / "config_used.json").at("spin").at("d_perp_mhz") == 775.0);

    std::string header;
    csv_column(dir / "a" / "rates.csv", 0, &header);
    CHECK(header == "T_K,w_down_Hz,w_up_Hz,w_a_Hz,gamma_mn_exact_MHz,"
                    "gamma_mn_quadratic_MHz,w_down_over_T2_Hz_per_K2,q_Hz_per_K2");
}

TEST_CASE("strain-free rates are quadratic over the measured range") {
    const fs::path dir = case_dir("rates_xi_zero");
    REQUIRE(run_cli("rates --xi-zero --tmin 295 --tmax 550 --step 5 --out " +
                    dir.string()) == 0);
    const auto wd_t2 = csv_column(dir / "rates.csv", 6);
    REQUIRE(wd_t2.size() == 52);
    double lo = wd_t2[0], hi = wd_t2[0], sum = 0.0;
    for (double v : wd_t2) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    CHECK((hi - lo) / (sum / wd_t2.size()) < 0.01);
}

TEST_CASE("odmr simulate narrows and shrinks with temperature") {
    const fs::path dir = case_dir("odmr_simulate");
    REQUIRE(run_cli("odmr simulate --temp 315 --rf-power 0.4 --out " +
                    (dir / "t315").string()) == 0);
    REQUIRE(run_cli("odmr simulate --temp 455 --rf-power 0.4 --out " +
                    (dir / "t455").string()) == 0);

    const json a = load_json(dir / "t315" / "odmr_summary.json");
    const json b = load_json(dir / "t455" / "odmr_summary.json");
    CHECK(a.at("splitting_mhz").get<double>() ==
          doctest::Approx(oracle::kSplit315).epsilon(1e-12));
    CHECK(b.at("splitting_mhz").get<double>() ==
          doctest::Approx(oracle::kSplit455).epsilon(1e-12));
    CHECK(b.at("splitting_mhz").get<double>() < a.at("splitting_mhz").get<double>());
    CHECK(b.at("linewidth_mhz").get<double>() < a.at("linewidth_mhz").get<double>());
    CHECK(a.at("contrast").get<double>() > 0.0);
    CHECK(a.at("contrast").get<double>() < 0.16); // below the saturation ceiling

    CHECK(csv_column(dir / "t315" / "spectrum.csv", 0).size() == 2001);
    for (const char* f : {"linewidth_vs_T.csv", "linewidth_vs_P.csv", "contrast_vs_P.csv",
                          "splitting_vs_T.csv", "spectrum.svg"})
        CHECK(fs::exists(dir / "t315" / f));
}

TEST_CASE("odmr fit recovers the generating parameters through the CLI") {
    const fs::path dir = case_dir("odmr_fit");
    const fs::path sim = dir / "sim";
    REQUIRE(run_cli("odmr simulate --out " + sim.string()) == 0);

    // start the fit away from the generating values
    const fs::path cfg = dir / "start.json";
    write_file(cfg, R"({"odmr": {"gamma_inh_mhz": 40, "kappa_mhz2_per_w": 150,
                        "c_max": 0.20}, "spin": {"xi_perp_mev": 3.5}})");
    const std::string data = (sim / "linewidth_vs_T.csv").string() + " " +
                             (sim / "linewidth_vs_P.csv").string() + " " +
                             (sim / "contrast_vs_P.csv").string() + " " +
                             (sim / "splitting_vs_T.csv").string();
    REQUIRE(run_cli("odmr fit --config " + cfg.string() + " --out " +
                    (dir / "fit").string() + " --data " + data) == 0);

    const json r = load_json(dir / "fit" / "fit_result.json");
    REQUIRE(r.at("converged").get<bool>());
    const double q_truth = nvep::phonon::q_constant({}, {}) * 1e-6;
    const std::vector<std::pair<std::string, double>> expect = {
        {"gamma_inh_mhz", 33.0},
        {"kappa_mhz2_per_w", 210.0},
        {"c_max", 0.16},
        {"q_mhz_per_k2", q_truth},
        {"xi_perp_mev", 4.6}};
    for (const auto& p : r.at("parameters")) {
        for (const auto& [name, value] : expect)
            if (p.at("name").get<std::string>() == name)
                CHECK(p.at("value").get<double>() == doctest::Approx(value).epsilon(0.01));
    }
    for (const char* f : {"fit_linewidth_vs_T.svg", "fit_linewidth_vs_P.svg",
                          "fit_contrast_vs_P.svg", "fit_splitting_vs_T.svg"})
        CHECK(fs::exists(dir / "fit" / f));
}

TEST_CASE("zpl and visibility eval feed the combined fit") {
    const fs::path dir = case_dir("zpl_vis");
    REQUIRE(run_cli("zpl eval --xi-zero --out " + dir.string()) == 0);
    REQUIRE(run_cli("visibility eval --xi-zero --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "zpl.svg"));
    CHECK(fs::exists(dir / "visibility.svg"));

    // model curves refit with the generating parameters: immediate convergence
    REQUIRE(run_cli("zpl fit --sequential --out " + (dir / "fit").string() + " --data " +
                    (dir / "zpl_curve.csv").string() + " " +
                    (dir / "visibility_curve.csv").string()) == 0);
    const json r = load_json(dir / "fit" / "fit_result.json");
    CHECK(r.at("converged").get<bool>());
    CHECK(r.at("n_points").get<int>() == 300);
    CHECK(r.at("chi2").get<double>() < 1e-10);
    CHECK(fs::exists(dir / "fit" / "fit_zpl_vs_T.svg"));
    CHECK(fs::exists(dir / "fit" / "fit_visibility_vs_T.svg"));
}

TEST_CASE("mn validate agrees with the narrowing formula and reruns identically") {
    const fs::path dir = case_dir("mn_validate");
    const fs::path cfg = dir / "mc.json";
    write_file(cfg, R"({"mc": {"n_trajectories": 2000, "n_time_samples": 4096,
                        "n_bootstrap": 20}})");
    const std::string args = "mn validate --xi-zero --w-down 77500 --config " +
                             cfg.string() + " --out ";
    REQUIRE(run_cli(args + (dir / "a").string()) == 0);
    REQUIRE(run_cli(args + (dir / "b").string()) == 0);

    const json r = load_json(dir / "a" / "mn_report.json");
    CHECK(r.at("fwhm_formula_mhz").get<double>() ==
          doctest::Approx(oracle::kFwhmX0).epsilon(1e-12));
    CHECK(r.at("beta").get<double>() == 1.0);
    CHECK(r.at("occupancy_expected").get<double>() == 0.5);
    CHECK(std::abs(r.at("relative_error").get<double>()) < 0.35);
    CHECK(r.at("ci95_mhz").size() == 2);
    CHECK(read_file(dir / "a" / "mn_report.json") ==
          read_file(dir / "b" / "mn_report.json"));
}

TEST_CASE("report renders all six panels") {
    const fs::path dir = case_dir("report");
    REQUIRE(run_cli("report --out " + dir.string()) == 0);
    for (const char* f :
         {"fig_linewidth_vs_T.svg", "fig_linewidth_vs_P.svg", "fig_contrast_vs_P.svg",
          "fig_splitting_vs_T.svg", "fig_zpl_vs_T.svg", "fig_visibility_vs_T.svg"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(dir / f));
        CHECK(read_file(dir / f).find("</svg>") != std::string::npos);
    }
}

TEST_CASE("failures map to distinct exit codes") {
    const fs::path dir = case_dir("exit_codes");

    const fs::path broken = dir / "broken.json";
    write_file(broken, "nope{\n");
    const fs::path log2 = dir / "parse.log";
    CHECK(run_cli("rates --config " + broken.string() + " --out " +
                      (dir / "o2").string(),
                  log2) == 2);
    CHECK(read_file(log2).find("JSON parse error") != std::string::npos);

    const fs::path invalid = dir / "invalid.json";
    write_file(invalid, R"({"spin": {"d_perp_mhz": -5}})");
    const fs::path log3 = dir / "invalid.log";
    CHECK(run_cli("rates --config " + invalid.string() + " --out " +
                      (dir / "o3").string(),
                  log3) == 3);
    CHECK(read_file(log3).find("invalid value for 'd_perp_mhz'") != std::string::npos);

    CHECK(run_cli("rates --step -1 --out " + (dir / "o4").string()) == 3);

    const fs::path log5 = dir / "missing.log";
    CHECK(run_cli("odmr fit --out " + (dir / "o5").string() + " --data " +
                      (dir / "no_such_file.csv").string(),
                  log5) == 5);
    CHECK(read_file(log5).find("cannot open") != std::string::npos);
}
