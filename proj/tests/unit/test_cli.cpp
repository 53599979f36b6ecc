#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "divopt/artifacts.hpp"
#include "divopt/cli.hpp"
#include "divopt/closed_form.hpp"
#include "divopt/config.hpp"

using namespace divopt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("divopt_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

json tiny_config() {
    return json{{"mode", "base"},
                {"model", {{"r", 0.05}, {"sigma", 0.1}, {"rho", 0.0}}},
                {"drift", {{"kind", "ou"}, {"k", 0.5}, {"mu_bar", 0.15}, {"sigma_tilde", 0.3}}},
                {"grid", {{"x_max", 3.0}, {"mu_min", -2.0}, {"mu_max", 2.0}, {"nx", 41}, {"nmu", 41}}},
                {"solver", {{"K", "auto"}, {"tau", 0.0}, {"max_iter", 200}}}};
}

fs::path write_config(const TempDir& dir, const json& j, const char* name = "config.json") {
    const fs::path p = dir.path / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliOptions quiet_opts(const fs::path& out, std::ostream* sink) {
    CliOptions opts;
    opts.out_dir = out.string();
    opts.out = sink;
    opts.err = sink;
    return opts;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("config defaults resolve to the reference parameter set") {
    const RunConfig cfg = parse_run_config_json(json::object());
    CHECK(cfg.model.r == 0.05);
    CHECK(cfg.model.sigma == 0.1);
    CHECK(cfg.model.rho == 0.0);
    CHECK(cfg.grid.x_max == 5.0);
    CHECK(cfg.grid.mu_min == -2.0);
    CHECK(cfg.grid.mu_max == 2.0);
    CHECK(cfg.grid.nx == 300);
    CHECK(cfg.grid.nmu == 300);
    CHECK(cfg.K == doctest::Approx(100.0 / (5.0 / 299.0)));
    CHECK(cfg.tau == 0.0);
    CHECK(cfg.max_iter == 200);
}

TEST_CASE("config errors name the offending field") {
    auto expect_error = [](json j, const char* needle) {
        try {
            parse_run_config_json(j);
            FAIL_CHECK("expected ConfigError for ", needle);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error(json{{"model", {{"r", -1.0}}}}, "model.r");
    expect_error(json{{"model", {{"rho", 2.0}}}}, "model.rho");
    expect_error(json{{"drift", {{"kind", "brownian"}}}}, "drift.kind");
    expect_error(json{{"solver", {{"K", "sometimes"}}}}, "solver.K");
    expect_error(json{{"solver", {{"max_iter", 0}}}}, "solver.max_iter");
    expect_error(json{{"mode", "credit_line"}, {"credit", {{"x_lower", 0.5}}}}, "credit.x_lower");
}

TEST_CASE("missing config file exits with status 1 and names the path") {
    std::ostringstream sink;
    CliOptions opts;
    opts.err = &sink;
    opts.out = &sink;
    CHECK(run_file("/nonexistent/divopt.json", opts) == 1);
    CHECK(sink.str().find("/nonexistent/divopt.json") != std::string::npos);
}

TEST_CASE("base run writes the pinned artifact set") {
    TempDir dir;
    std::ostringstream sink;
    const fs::path cfg_path = write_config(dir, tiny_config());
    const fs::path out = dir.path / "out";
    CHECK(run_file(cfg_path.string(), quiet_opts(out, &sink)) == 0);

    const std::string boundaries = slurp(out / "boundaries.csv");
    CHECK(boundaries.rfind("mu,divLower,divUpper\n", 0) == 0);
    const std::string value = slurp(out / "value.csv");
    CHECK(value.rfind("x,mu,V,ell\n", 0) == 0);
    CHECK(std::count(value.begin(), value.end(), '\n') == 41 * 41 + 1);

    const json report = json::parse(slurp(out / "report.json"));
    CHECK(report.at("halt_reason") != "MAX_ITER");
    CHECK(report.at("iterations").get<int>() >= 1);
    CHECK(fs::exists(out / "config_echo.json"));
}

TEST_CASE("identical runs produce bit-identical artifacts") {
    TempDir dir;
    std::ostringstream sink;
    const fs::path cfg_path = write_config(dir, tiny_config());
    CHECK(run_file(cfg_path.string(), quiet_opts(dir.path / "a", &sink)) == 0);
    CHECK(run_file(cfg_path.string(), quiet_opts(dir.path / "b", &sink)) == 0);
    CHECK(slurp(dir.path / "a" / "boundaries.csv") == slurp(dir.path / "b" / "boundaries.csv"));
    CHECK(slurp(dir.path / "a" / "value.csv") == slurp(dir.path / "b" / "value.csv"));
}

TEST_CASE("the config echo reproduces the run") {
    TempDir dir;
    std::ostringstream sink;
    const fs::path cfg_path = write_config(dir, tiny_config());
    CHECK(run_file(cfg_path.string(), quiet_opts(dir.path / "a", &sink)) == 0);
    CHECK(run_file((dir.path / "a" / "config_echo.json").string(),
                   quiet_opts(dir.path / "b", &sink)) == 0);
    CHECK(slurp(dir.path / "a" / "value.csv") == slurp(dir.path / "b" / "value.csv"));
}

TEST_CASE("max_iter exhaustion surfaces as exit code 2") {
    TempDir dir;
    std::ostringstream sink;
    json cfg = tiny_config();
    cfg["solver"]["max_iter"] = 1;
    const fs::path cfg_path = write_config(dir, cfg);
    CHECK(run_file(cfg_path.string(), quiet_opts(dir.path / "out", &sink)) == 2);
}

TEST_CASE("deterministic mode emits the closed-form table") {
    TempDir dir;
    std::ostringstream sink;
    json cfg = tiny_config();
    cfg["mode"] = "deterministic";
    const fs::path cfg_path = write_config(dir, cfg);
    const fs::path out = dir.path / "out";
    CHECK(run_file(cfg_path.string(), quiet_opts(out, &sink)) == 0);

    const std::string csv = slurp(out / "deterministic.csv");
    CHECK(csv.rfind("mu,xb,futureIncome\n", 0) == 0);
    // Spot-check one row against the closed form.
    const DeterministicParams p(0.05, 0.5, 0.15);
    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line);  // header
    REQUIRE(std::getline(rows, line));
    const double mu = std::stod(line.substr(0, line.find(',')));
    CHECK(mu == -2.0);
    const auto second_comma = line.find(',', line.find(',') + 1);
    const double xb_val = std::stod(line.substr(line.find(',') + 1, second_comma));
    CHECK(xb_val == doctest::Approx(x_b(p, -2.0)).epsilon(1e-12));

    const json report = json::parse(slurp(out / "report.json"));
    CHECK(report.at("mu_star").get<double>() == doctest::Approx(-1.4307634469).epsilon(1e-6));
}

TEST_CASE("auxiliary mode reports the 1-D threshold") {
    TempDir dir;
    std::ostringstream sink;
    json cfg = tiny_config();
    cfg["mode"] = "auxiliary";
    cfg["grid"]["nx"] = 5;
    cfg["grid"]["nmu"] = 121;
    const fs::path out = dir.path / "out";
    CHECK(run_file(write_config(dir, cfg).string(), quiet_opts(out, &sink)) == 0);
    const json report = json::parse(slurp(out / "report.json"));
    CHECK(report.at("mu_star").is_number());
    CHECK(report.at("mu_star").get<double>() < 0.0);
    CHECK(slurp(out / "auxiliary.csv").rfind("mu,Va\n", 0) == 0);
}

TEST_CASE("validate mode exit codes") {
    TempDir dir;
    std::ostringstream sink;
    json good = tiny_config();
    good["mode"] = "validate";
    CHECK(run_file(write_config(dir, good).string(), quiet_opts(dir.path / "a", &sink)) == 0);
    CHECK(sink.str().find("check mean_reversion: pass") != std::string::npos);
}

TEST_CASE("mc mode writes estimates against the grid value") {
    TempDir dir;
    std::ostringstream sink;
    json cfg = tiny_config();
    cfg["mode"] = "mc";
    cfg["mc"] = {{"n_paths", 400},
                 {"dt", 0.01},
                 {"t_horizon", 20.0},
                 {"seed", 7},
                 {"points", json::array({json::array({0.5, 0.15})})}};
    const fs::path out = dir.path / "out";
    CliOptions opts = quiet_opts(out, &sink);
    opts.seed = 42;  // flag override becomes part of the echoed config
    CHECK(run_file(write_config(dir, cfg).string(), opts) == 0);
    const std::string csv = slurp(out / "mc.csv");
    CHECK(csv.rfind("x,mu,gridV,mcMean,mcStdErr,nRuined,nCensored\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(sink.str().find("mc (x=0.5") != std::string::npos);
    const json echo = json::parse(slurp(out / "config_echo.json"));
    CHECK(echo.at("mc").at("seed").get<int>() == 42);
}

TEST_CASE("sweep runs every value and writes a summary") {
    TempDir dir;
    std::ostringstream sink;
    const RunConfig cfg = parse_run_config_json(tiny_config());
    CliOptions opts = quiet_opts(dir.path / "out", &sink);

    CHECK(sweep(cfg, "sigma", {}, opts) == 1);
    CHECK(sweep(cfg, "not_a_param", {0.1}, opts) == 1);

    CHECK(sweep(cfg, "sigma", {0.1, 0.2}, opts) == 0);
    CHECK(fs::exists(dir.path / "out" / "sweep_sigma_0.1" / "boundaries.csv"));
    CHECK(fs::exists(dir.path / "out" / "sweep_sigma_0.2" / "boundaries.csv"));
    const std::string summary = slurp(dir.path / "out" / "summary.csv");
    CHECK(summary.rfind("param,value,muStar,xBarAtMuBar,iterations,haltReason\n", 0) == 0);
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);
}

TEST_CASE("sweep records a failing value and continues") {
    TempDir dir;
    std::ostringstream sink;
    const RunConfig cfg = parse_run_config_json(tiny_config());
    CliOptions opts = quiet_opts(dir.path / "out", &sink);

    // sigma = -1 fails validation; the remaining value still runs.
    CHECK(sweep(cfg, "sigma", {-1.0, 0.2}, opts) == 1);
    CHECK(fs::exists(dir.path / "out" / "sweep_sigma_0.2" / "boundaries.csv"));
    const std::string summary = slurp(dir.path / "out" / "summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);
    CHECK(summary.find("ERROR") != std::string::npos);
    CHECK(sink.str().find("model.sigma") != std::string::npos);
}

TEST_CASE("csv formatting round-trips doubles") {
    for (double v : {0.1, -1.4307634468836830, 5.0, 1e-12, 123456.789}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_SUITE_END();
