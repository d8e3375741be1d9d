#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "dymo/error.hpp"
#include "dymo/harness.hpp"

using namespace dymo;
using namespace dymo::harness;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("dymo-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ignored;
        fs::remove_all(path, ignored);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
    }
    return files;
}

std::size_t line_count(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

RunConfig small_config(const fs::path& out) {
    RunConfig c;
    c.m = 2000;
    c.duration = 150;
    c.out_dir = out;
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DYMO_SIM_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config files") {
    RunConfig c;
    std::istringstream in("# venue\nscenario = stadium\n\nm = 5000  # UEs\np=0.005\nschemes = dymo, optimal\n"
                          "sweep_axis = r\nsweep_values = 5,10\nsmooth_threshold = true\n");
    apply_config_stream(c, in, "a.cfg");
    CHECK(c.scenario == venue::ScenarioKind::stadium);
    CHECK(c.m == 5000);
    CHECK(c.p == 0.005);
    CHECK(c.schemes == std::vector<ctl::SchemeKind>{ctl::SchemeKind::dymo, ctl::SchemeKind::optimal});
    CHECK(c.sweep_axis == SweepAxis::r);
    CHECK(c.sweep_values == std::vector<double>{5, 10});
    CHECK(c.smooth_threshold);
    CHECK_NOTHROW(c.validate());

    std::istringstream unknown("m = 10\nspeed = 3\n");
    CHECK_THROWS_WITH_AS(apply_config_stream(c, unknown, "b.cfg"), "b.cfg:2: unknown setting 'speed'",
                         ConfigError);
    std::istringstream no_eq("m 10\n");
    CHECK_THROWS_WITH_AS(apply_config_stream(c, no_eq, "c.cfg"), "c.cfg:1: expected key = value",
                         ConfigError);
    std::istringstream bad_num("\n\np = often\n");
    CHECK_THROWS_WITH_AS(apply_config_stream(c, bad_num, "d.cfg"),
                         "d.cfg:3: p: expected a number, got 'often'", ConfigError);
    CHECK_THROWS_AS(apply_config_file(c, "/nonexistent/run.cfg"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "scenario", "arena"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "schemes", "dymo,dymo"), ConfigError);
    CHECK_THROWS_AS(parse_number_list("1,,2"), ConfigError);
    CHECK_THROWS_AS(parse_sweep_axis("L"), ConfigError);

    RunConfig bad;
    bad.p = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.sweep_axis = SweepAxis::m;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.warmup = 150;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config echo reads back to the same configuration") {
    RunConfig c;
    apply_setting(c, "scenario", "failure");
    apply_setting(c, "p", "0.0005");
    apply_setting(c, "m_guess", "unknown");
    apply_setting(c, "sweep_axis", "m");
    apply_setting(c, "sweep_values", "5000,10000");
    std::ostringstream first;
    write_config(first, c);
    RunConfig back;
    std::istringstream in(first.str());
    apply_config_stream(back, in, "echo");
    std::ostringstream second;
    write_config(second, back);
    CHECK(first.str() == second.str());
    CHECK(first.str().find("out =") == std::string::npos);
    CHECK(first.str().find("parallel =") == std::string::npos);
}

TEST_CASE("output directory default") {
    ::unsetenv("DYMO_OUT_DIR");
    CHECK(default_out_dir() == fs::path("dymo-out"));
    ::setenv("DYMO_OUT_DIR", "/tmp/elsewhere", 1);
    CHECK(default_out_dir() == fs::path("/tmp/elsewhere"));
    ::unsetenv("DYMO_OUT_DIR");
}

TEST_CASE("a run writes one 150-row CSV per scheme") {
    TempDir tmp;
    const RunConfig c = small_config(tmp.path / "out");
    run(c);
    const auto files = tree(c.out_dir);
    CHECK(files.count("config.txt") == 1);
    CHECK(files.count("mcs_table.csv") == 1);
    REQUIRE(files.count("summary.csv") == 1);
    CHECK(line_count(files.at("summary.csv")) == 1 + ctl::all_schemes().size());
    for (ctl::SchemeKind k : ctl::all_schemes()) {
        const std::string name = "intervals/base/instance_0/" + std::string(ctl::to_string(k)) + ".csv";
        REQUIRE(files.count(name) == 1);
        CHECK(line_count(files.at(name)) == 151);
    }
    CHECK_FALSE(fs::exists(tmp.path / "out.staging"));
    CHECK_FALSE(fs::exists(c.out_dir / "traces"));
}

TEST_CASE("a sweep writes one summary row per point and scheme") {
    TempDir tmp;
    RunConfig c = small_config(tmp.path / "out");
    c.duration = 30;
    c.sweep_axis = SweepAxis::p;
    c.sweep_values = {0.0005, 0.001, 0.005, 0.01};
    c.schemes = {ctl::SchemeKind::dymo, ctl::SchemeKind::optimal};
    c.dump_traces = true;
    const ExperimentResult r = run(c);
    CHECK(r.points.size() == 4);
    const std::string summary = slurp(c.out_dir / "summary.csv");
    CHECK(line_count(summary) == 1 + 4 * 2);
    CHECK(summary.find("\np,0.005,dymo,") != std::string::npos);
    CHECK(fs::exists(c.out_dir / "intervals/p_0.01/instance_0/optimal.csv"));
    CHECK(fs::exists(c.out_dir / "traces/p_0.01/instance_0/instructions.csv"));
    CHECK(fs::exists(c.out_dir / "traces/p_0.01/instance_0/heatmap.csv"));
}

TEST_CASE("artifacts are identical across repeats and parallel degrees") {
    TempDir tmp;
    RunConfig c = small_config(tmp.path / "a");
    c.duration = 40;
    c.instances = 3;
    c.scenario = venue::ScenarioKind::stadium;
    c.dump_traces = true;
    run(c);
    c.out_dir = tmp.path / "b";
    run(c);
    c.out_dir = tmp.path / "c";
    c.parallel = 3;
    run(c);
    const auto a = tree(tmp.path / "a");
    CHECK(a.size() > 10);
    CHECK(a == tree(tmp.path / "b"));
    CHECK(a == tree(tmp.path / "c"));
}

TEST_CASE("instances differ by seed and share nothing else") {
    RunConfig c;
    c.m = 1000;
    c.duration = 20;
    c.instances = 2;
    const ExperimentResult r = run_experiment(c);
    REQUIRE(r.points.size() == 1);
    REQUIRE(r.points[0].instances.size() == 2);
    CHECK(r.points[0].instances[0].seed + 1 == r.points[0].instances[1].seed);
    CHECK(r.points[0].instances[0].reference != r.points[0].instances[1].reference);
}

TEST_CASE("a failed run leaves no staging directory") {
    TempDir tmp;
    const fs::path blocker = tmp.path / "taken";
    { std::ofstream(blocker) << "keep"; }
    RunConfig c = small_config(blocker);
    c.duration = 10;
    CHECK_THROWS(run(c));
    CHECK_FALSE(fs::exists(tmp.path / "taken.staging"));
    CHECK(slurp(blocker) == "keep");
}

TEST_CASE("command line") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "run.cfg";
    { std::ofstream(cfg) << "m = 1500\nduration = 20\nschemes = dymo\n"; }
    const fs::path out = tmp.path / "out";
    CHECK(run_cli("run --config " + cfg.string() + " --duration 25 --out " + out.string()) == 0);
    const std::string echo = slurp(out / "config.txt");
    CHECK(echo.find("m = 1500\n") != std::string::npos);
    CHECK(echo.find("duration = 25\n") != std::string::npos);
    CHECK(line_count(slurp(out / "intervals/base/instance_0/dymo.csv")) == 26);

    const fs::path bad = tmp.path / "bad.cfg";
    { std::ofstream(bad) << "m = 10\nwarp = 9\n"; }
    CHECK(run_cli("run --config " + bad.string() + " --out " + out.string()) == 2);
    CHECK(run_cli("run --p 2 --out " + out.string()) == 2);
    CHECK(run_cli("run --sweep L 1,2 --out " + out.string()) == 2);
    CHECK(run_cli("validate --runs 200") == 0);
}
