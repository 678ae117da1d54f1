#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "upmeta/cli_commands.hpp"
#include "upmeta/result_table.hpp"
#include "upmeta/run_config.hpp"
#include "upmeta/svg_plot.hpp"

using namespace upmeta;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("upmeta_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_runtime_column(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        const auto last = line.rfind(',');
        out << (last == std::string::npos ? line : line.substr(0, last)) << '\n';
    }
    return out.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config: defaults and unit-tagged powers") {
    const RunConfig def = RunConfig::from_json_text("{}");
    CHECK(def.params.bs_density == doctest::Approx(1e-5));
    CHECK(def.params.p_max_w == doctest::Approx(0.2));
    CHECK(def.params.rho_w == doctest::Approx(8e-6));

    const RunConfig mw = RunConfig::from_json_text(
        R"({"params": {"p_max_mw": 200, "rho_mw": 0.008}})");
    CHECK(mw.params.p_max_w == doctest::Approx(0.2));
    CHECK(mw.params.rho_w == doctest::Approx(8e-6));

    const RunConfig w = RunConfig::from_json_text(
        R"({"params": {"p_max_w": 0.2, "rho_w": 8e-6}})");
    CHECK(w.params.p_max_w == mw.params.p_max_w);
    CHECK(w.params.rho_w == mw.params.rho_w);

    CHECK_THROWS_AS(
        RunConfig::from_json_text(R"({"params": {"p_max_mw": 200, "p_max_w": 0.2}})"),
        config_error);
}

TEST_CASE("config: validation errors name the field") {
    CHECK_THROWS_WITH_AS(RunConfig::from_json_text(R"({"methods": []})"),
                         doctest::Contains("methods"), config_error);
    CHECK_THROWS_WITH_AS(RunConfig::from_json_text(R"({"gamma": [0.0, 0.5]})"),
                         doctest::Contains("gamma"), config_error);
    CHECK_THROWS_WITH_AS(RunConfig::from_json_text(R"({"gamma": [0.5, 1.0]})"),
                         doctest::Contains("gamma"), config_error);
    CHECK_THROWS_WITH_AS(RunConfig::from_json_text(R"({"theta_db": []})"),
                         doctest::Contains("theta_db"), config_error);
    CHECK_THROWS_WITH_AS(RunConfig::from_json_text(R"({"methods": ["prposed"]})"),
                         doctest::Contains("prposed"), config_error);
    CHECK_THROWS_AS(RunConfig::from_json_text("not json"), config_error);
    CHECK_THROWS_WITH_AS(RunConfig::from_json_text(R"({"params": {"alpha": 1.5}})"),
                         doctest::Contains("alpha"), config_error);
}

TEST_CASE("csv schema is stable (golden)") {
    ResultTable t;
    t.seed = 7;
    t.bs_density = 1e-5;
    t.tolerances = "quad=1e-8";
    t.rows.push_back({"proposed", 0.4, -10.0, 0.1, 0.3524958125, std::nullopt, 12.345});
    t.rows.push_back({"mc", 0.4, -10.0, 0.1, 0.34, 0.0421, 99.5});

    const std::string expected =
        "# upmeta-results v0.1.0\n"
        "# seed=7\n"
        "# bs_density_per_m2=1e-05\n"
        "# tolerances=quad=1e-8\n"
        "method,epsilon,theta_db,gamma,value,ci,runtime_ms\n"
        "proposed,0.4,-10,0.1,0.3524958125,,12.345\n"
        "mc,0.4,-10,0.1,0.34,0.0421,99.500\n";
    CHECK(to_csv(t) == expected);

    // runtime masking used by the reproducibility comparison
    CHECK(to_csv(t, false).find("12.345") == std::string::npos);
}

TEST_CASE("cmd_meta: small analytic run writes CSV and SVG") {
    TempDir tmp;
    RunConfig cfg = RunConfig::from_json_text(R"({
        "theta_db": [-10.0, 0.0],
        "gamma": [0.25, 0.5, 0.75],
        "methods": ["proposed", "beta"],
        "threads": 2
    })");
    cfg.csv_path = (tmp.path / "out.csv").string();
    cfg.svg_dir = (tmp.path / "figs").string();

    std::ostringstream log;
    CHECK(cmd_meta(cfg, log) == kExitOk);

    const std::string csv = slurp(cfg.csv_path);
    CHECK(csv.find("method,epsilon,theta_db,gamma,value,ci,runtime_ms") != std::string::npos);
    // 2 methods x 2 thetas x 3 gammas rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 12 + 5);
    CHECK(csv.find("proposed,") != std::string::npos);
    CHECK(csv.find("beta,") != std::string::npos);

    // svg per (eps, axis)
    const std::string svg = slurp(tmp.path / "figs" / "meta_eps0p4_vs_gamma.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(std::count(svg.begin(), svg.end(), '<') > 10);
    // one polyline per method
    std::size_t polylines = 0;
    for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos)
        ++polylines;
    CHECK(polylines == 2);
}

TEST_CASE("cmd_meta: deterministic rerun modulo runtime") {
    TempDir tmp;
    RunConfig cfg = RunConfig::from_json_text(R"({
        "theta_db": [0.0],
        "gamma": [0.3, 0.6],
        "methods": ["proposed", "mc"],
        "sim": {"n_realizations": 40, "seed": 1234},
        "params": {"bs_density_per_m2": 1e-4},
        "threads": 2
    })");
    cfg.csv_path = (tmp.path / "a.csv").string();
    std::ostringstream log;
    REQUIRE(cmd_meta(cfg, log) == kExitOk);
    const std::string a = slurp(cfg.csv_path);

    cfg.csv_path = (tmp.path / "b.csv").string();
    REQUIRE(cmd_meta(cfg, log) == kExitOk);
    const std::string b = slurp(cfg.csv_path);

    CHECK(a != "");
    CHECK(strip_runtime_column(a) == strip_runtime_column(b));
}

TEST_CASE("cmd_meta: realization dumps") {
    TempDir tmp;
    RunConfig cfg = RunConfig::from_json_text(R"({
        "theta_db": [0.0],
        "gamma": [0.5],
        "methods": ["mc"],
        "params": {"bs_density_per_m2": 1e-4},
        "sim": {"n_realizations": 3, "seed": 2},
        "threads": 1
    })");
    cfg.csv_path = (tmp.path / "out.csv").string();
    cfg.realization_dump_dir = (tmp.path / "dumps").string();
    std::ostringstream log;
    REQUIRE(cmd_meta(cfg, log) == kExitOk);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(tmp.path / "dumps")) {
        ++files;
        const std::string text = slurp(entry.path());
        CHECK(text.rfind("kind,x_m,y_m\n", 0) == 0);
        CHECK(text.find("ue,") != std::string::npos);
    }
    CHECK(files == 3);
}

TEST_CASE("cmd_validate: passing run exits 0") {
    TempDir tmp;
    RunConfig cfg = RunConfig::from_json_text(R"({
        "theta_db": [0.0],
        "gamma": [0.4, 0.6],
        "methods": ["proposed", "mc"],
        "params": {"bs_density_per_m2": 1e-4},
        "sim": {"n_realizations": 50, "seed": 8},
        "tolerances": {"proposed_vs_mc": 0.5},
        "threads": 2
    })");
    cfg.csv_path = (tmp.path / "v.csv").string();
    cfg.report_path = (tmp.path / "r.json").string();
    std::ostringstream log;
    CHECK(cmd_validate(cfg, log) == kExitOk);
    const std::string report = slurp(cfg.report_path);
    CHECK(report.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("cmd_validate: requires the simulation reference") {
    TempDir tmp;
    RunConfig cfg = RunConfig::from_json_text(R"({
        "theta_db": [0.0],
        "gamma": [0.5],
        "methods": ["proposed", "beta"]
    })");
    cfg.csv_path = (tmp.path / "v.csv").string();
    cfg.report_path = (tmp.path / "r.json").string();
    std::ostringstream log;
    CHECK(cmd_validate(cfg, log) == kExitConfigError);
    CHECK(log.str().find("simulation reference") != std::string::npos);
}

TEST_CASE("cmd_validate: zero tolerances force exit 3") {
    TempDir tmp;
    RunConfig cfg = RunConfig::from_json_text(R"({
        "theta_db": [0.0],
        "gamma": [0.4],
        "methods": ["proposed", "mc"],
        "params": {"bs_density_per_m2": 1e-4},
        "sim": {"n_realizations": 30, "seed": 5},
        "tolerances": {"proposed_vs_mc": 0.0},
        "threads": 2
    })");
    cfg.csv_path = (tmp.path / "v.csv").string();
    cfg.report_path = (tmp.path / "r.json").string();
    std::ostringstream log;
    CHECK(cmd_validate(cfg, log) == kExitToleranceFailure);
    const std::string report = slurp(cfg.report_path);
    CHECK(report.find("\"pass\": false") != std::string::npos);
    CHECK(report.find("max_abs_dev") != std::string::npos);
}

TEST_CASE("cmd_moments: kernel table") {
    TempDir tmp;
    RunConfig cfg = RunConfig::from_json_text(R"({
        "theta_db": [0.0],
        "gamma": [0.5],
        "methods": ["proposed"]
    })");
    cfg.csv_path = (tmp.path / "m.csv").string();
    std::ostringstream log;
    CHECK(cmd_moments(cfg, {0.0, 1.0, 2.0}, log) == kExitOk);
    const std::string csv = slurp(cfg.csv_path);
    CHECK(csv.find("kernel,epsilon,theta_db,b,value,se,runtime_ms") != std::string::npos);
    CHECK(csv.find("laplace-rescaled,") != std::string::npos);
    CHECK(csv.find("pgfl-exact,") != std::string::npos);

    // b = 0 rows are exactly 1 for both kernels
    std::istringstream in(csv);
    std::string line;
    int checked = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("kernel,", 0) == 0) continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        REQUIRE(fields.size() >= 6);
        if (fields[3] == "0") {
            CHECK(fields[4] == "1");
            ++checked;
        }
    }
    CHECK(checked == 2);

    CHECK(cmd_moments(cfg, {}, log) == kExitConfigError);
    CHECK(cmd_moments(cfg, {-1.0}, log) == kExitConfigError);
}

TEST_CASE("svg writer is self-contained") {
    PlotSpec spec;
    spec.title = "curves";
    spec.x_label = "x";
    spec.y_label = "y";
    spec.curves.push_back({"one", {0.0, 0.5, 1.0}, {0.1, 0.4, 0.9}});
    std::ostringstream os;
    write_svg(spec, os);
    const std::string svg = os.str();
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);  // no external assets
    CHECK(svg.find("polyline") != std::string::npos);
}

}  // TEST_SUITE
