#include "fluidalg/algebra_io.hpp"
#include "fluidalg/cli/commands.hpp"
#include "fluidalg/cli/config.hpp"
#include "fluidalg/cli/diagnostics.hpp"
#include "fluidalg/errors.hpp"
#include "fluidalg/instances.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fluidalg;
using namespace fluidalg::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("fluidalg_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const fs::path& dir, const ordered_json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    args.insert(args.begin(), "fluidalg");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

struct SeedEnv {
    explicit SeedEnv(const char* value) { ::setenv(kSeedOverrideEnv, value, 1); }
    ~SeedEnv() { ::unsetenv(kSeedOverrideEnv); }
};

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("defaults are filled and recorded") {
        const RunConfig c = load_config({{"instance", "rigid-body"}, {"initial_state", "axis1"}}, {}, std::nullopt);
        CHECK(c.effective["instance"]["moments"] == ordered_json({1.0, 2.0, 3.0}));
        CHECK(c.effective["integrator"]["method"] == "rk4");
        CHECK(c.effective["integrator"]["dt"] == 1e-3);
        CHECK(c.effective["integrator"]["t_end"] == 1.0);
        CHECK(c.effective["integrator"]["record_every"] == 1);
        CHECK(c.effective["integrator"]["projection"]["max_iter"] == 10);
        CHECK(c.effective["output_dir"] == ".");
        CHECK(c.effective["diagnostics"]["samples"] == 50);
        CHECK_FALSE(c.has_probe());
        const ordered_json t = load_config({{"instance", "torus"}}, {}, std::nullopt).effective["instance"];
        CHECK(t["K"] == 1);
        CHECK(t["max_dim"] == 512);
        const ordered_json r = load_config({{"instance", "random"}}, {}, std::nullopt).effective["instance"];
        CHECK(r["seed"] == 1);
        CHECK(r["n"] == 5);
    }

    TEST_CASE("dotted overrides parse JSON values") {
        const RunConfig c = load_config({{"instance", {{"name", "random"}}}},
                                        {"integrator.dt=0.01", "instance.n=7", "integrator.method=rk4-projected"},
                                        std::nullopt);
        CHECK(c.effective["integrator"]["dt"] == 0.01);
        CHECK(c.effective["instance"]["n"] == 7);
        CHECK(c.integrator().method == Method::rk4_projected);
    }

    TEST_CASE("configuration errors") {
        CHECK_THROWS_AS(load_config({{"instance", "nope"}}, {}, std::nullopt), ConfigError);
        CHECK_THROWS_AS(load_config({{"instance", "so3"}, {"bogus", 1}}, {}, std::nullopt), ConfigError);
        CHECK_THROWS_AS(load_config({{"instance", "so3"}}, {"integrator.dt=0"}, std::nullopt), ConfigError);
        CHECK_THROWS_AS(load_config({{"instance", "so3"}}, {"integrator.method=euler"}, std::nullopt), ConfigError);
        CHECK_THROWS_AS(load_config({{"instance", "so3"}}, {"noequals"}, std::nullopt), ConfigError);
        CHECK_THROWS_AS(load_config({{"instance", "so3"}, {"initial_state", 3}}, {}, std::nullopt), ConfigError);
        CHECK_THROWS_AS(build_instance(load_config({{"instance", "torus"}}, {"instance.K=3"}, std::nullopt)),
                        ConfigError);
    }

    TEST_CASE("seed override reaches every seeded field") {
        const ordered_json user{{"instance", {{"name", "random"}, {"seed", 4}}},
                                {"initial_state", {{"seed", 5}}},
                                {"probe", {{"seed", 6}, {"norm", 2.0}}}};
        const RunConfig c = load_config(user, {}, 99);
        CHECK(c.effective["instance"]["seed"] == 99);
        CHECK(c.effective["initial_state"]["seed"] == 99);
        CHECK(c.effective["initial_state"]["norm"] == 1.0);
        CHECK(c.effective["probe"]["seed"] == 99);
        CHECK(c.effective["probe"]["norm"] == 2.0);
        CHECK(c.effective["diagnostics"]["seed"] == 99);
    }

    TEST_CASE("state resolution") {
        const RunConfig c = load_config({{"instance", "random"}}, {}, std::nullopt);
        const Instance inst = build_instance(c);
        const Vec a = resolve_state(inst, {{"seed", 3}, {"norm", 2.5}}, 0);
        const Vec b = resolve_state(inst, {{"seed", 3}, {"norm", 2.5}}, 1);
        CHECK(g_norm(inst.algebra, a) == doctest::Approx(2.5).epsilon(1e-14));
        CHECK_FALSE(a == b);
        CHECK(resolve_state(inst, "axis2", 0) == Vec::Unit(5, 1));
        CHECK_THROWS_AS(resolve_state(inst, "axis9", 0), ConfigError);
        CHECK_THROWS_AS(resolve_state(inst, "beltrami", 0), ConfigError);
        CHECK_THROWS_AS(resolve_state(inst, ordered_json({1.0, 2.0}), 0), ConfigError);
    }
}

TEST_SUITE("simulate") {
    TEST_CASE("writes the three outputs with the documented headers") {
        TempDir tmp("outputs");
        const auto cfg = write_config(tmp.path, {{"instance", "random"},
                                                 {"initial_state", {{"seed", 2}}},
                                                 {"probe", {{"seed", 2}}},
                                                 {"integrator", {{"dt", 0.01}, {"t_end", 0.1}, {"record_every", 3}}},
                                                 {"output_dir", "out"}});
        REQUIRE(run({"simulate", "--config", cfg.string(), "--output", (tmp.path / "out").string()}) == 0);
        const auto trace = read_csv(tmp.path / "out" / "trace.csv");
        REQUIRE(trace.size() == 6);  // t = 0, 0.03, 0.06, 0.09, final 0.1 plus header
        CHECK(trace[0] == std::vector<std::string>{"t", "energy", "helicity", "probe_linking"});
        CHECK(std::stod(trace.back()[0]) == doctest::Approx(0.1).epsilon(1e-15));
        const auto state = read_csv(tmp.path / "out" / "state.csv");
        CHECK(state[0] == std::vector<std::string>{"t", "x0", "x1", "x2", "x3", "x4"});
        CHECK(state.size() == trace.size());

        const ordered_json summary = ordered_json::parse(slurp(tmp.path / "out" / "summary.json"));
        CHECK(summary["steps"] == 10);
        CHECK(summary["records"] == 5);
        CHECK(summary["failed"] == false);
        CHECK(summary["config"]["integrator"]["dt"] == 0.01);
        // Drifts recomputed from the CSV.
        double de = 0, dh = 0, dl = 0;
        for (std::size_t r = 1; r < trace.size(); ++r) {
            de = std::max(de, std::abs(std::stod(trace[r][1]) - std::stod(trace[1][1])));
            dh = std::max(dh, std::abs(std::stod(trace[r][2]) - std::stod(trace[1][2])));
            dl = std::max(dl, std::abs(std::stod(trace[r][3]) - std::stod(trace[1][3])));
        }
        CHECK(summary["max_abs_energy_drift"].get<double>() == de);
        CHECK(summary["max_abs_helicity_drift"].get<double>() == dh);
        CHECK(summary["max_abs_probe_linking_drift"].get<double>() == dl);
    }

    TEST_CASE("t_end = 0 gives a single row and an empty probe column without a probe") {
        TempDir tmp("zero");
        const auto cfg = write_config(tmp.path, {{"instance", "so3"}, {"initial_state", {1.0, 2.0, 3.0}}});
        REQUIRE(run({"simulate", "--config", cfg.string(), "--output", tmp.path.string(), "--set",
                     "integrator.t_end=0"}) == 0);
        const auto trace = read_csv(tmp.path / "trace.csv");
        REQUIRE(trace.size() == 2);
        CHECK(trace[1] == std::vector<std::string>{"0", "14", "14", ""});
    }

    TEST_CASE("byte-identical reruns, and the seed override changes them reproducibly") {
        TempDir tmp("determinism");
        const auto cfg = write_config(
            tmp.path, {{"instance", "random"}, {"initial_state", {{"seed", 1}}}, {"integrator", {{"t_end", 0.05}}}});
        // Same output directory each time: the effective config, including
        // output_dir, is part of summary.json.
        auto run_once = [&] {
            REQUIRE(run({"simulate", "--config", cfg.string(), "--output", (tmp.path / "out").string()}) == 0);
            return slurp(tmp.path / "out" / "trace.csv") + slurp(tmp.path / "out" / "state.csv") +
                   slurp(tmp.path / "out" / "summary.json");
        };
        const std::string a = run_once();
        CHECK(run_once() == a);
        std::string c, d;
        {
            SeedEnv env("17");
            c = run_once();
            d = run_once();
        }
        CHECK(c == d);
        CHECK(c != a);
        CHECK(c.find("\"seed\": 17") != std::string::npos);
    }

    TEST_CASE("exit codes") {
        TempDir tmp("codes");
        std::string err;
        const auto missing = write_config(tmp.path, {{"instance", "so3"}});
        CHECK(run({"simulate", "--config", missing.string(), "--output", tmp.path.string()}, nullptr, &err) == 1);
        CHECK(err.find("initial_state") != std::string::npos);
        CHECK(run({"simulate", "--config", (tmp.path / "absent.json").string()}) == 1);

        const auto blowup = write_config(tmp.path, {{"instance", "random"},
                                                    {"initial_state", {{"seed", 1}, {"norm", 1e170}}},
                                                    {"integrator", {{"dt", 0.1}, {"t_end", 1.0}}}});
        CHECK(run({"simulate", "--config", blowup.string(), "--output", (tmp.path / "b").string()}, nullptr, &err) ==
              2);
        const ordered_json summary = ordered_json::parse(slurp(tmp.path / "b" / "summary.json"));
        CHECK(summary["failed"] == true);
        CHECK(summary["failure"]["t"].is_number());

        const auto bad_moments =
            write_config(tmp.path, {{"instance", {{"name", "rigid-body"}, {"moments", {1, 0, 1}}}}, {"initial_state", "axis1"}});
        CHECK(run({"simulate", "--config", bad_moments.string(), "--output", tmp.path.string()}) == 3);
    }
}

TEST_SUITE("diagnose") {
    TEST_CASE("so3 passes and reports every identity") {
        TempDir tmp("diag");
        const auto cfg = write_config(tmp.path, {{"instance", "so3"}});
        REQUIRE(run({"diagnose", "--config", cfg.string(), "--output", tmp.path.string()}) == 0);
        const ordered_json j = ordered_json::parse(slurp(tmp.path / "diagnostics.json"));
        CHECK(j["tool"] == "fluidalg");
        CHECK(j["config"]["instance"]["name"] == "so3");
    }

    TEST_CASE("a corrupted custom algebra fails validation") {
        TempDir tmp("corrupt");
        std::ofstream(tmp.path / "bad.json") << R"({"dim": 3, "triple": [[0, 0, 1, 0.5]],
            "linking": [[1,0,0],[0,1,0],[0,0,1]], "metric": [[1,0,0],[0,1,0],[0,0,1]]})";
        const auto cfg = write_config(tmp.path, {{"instance", {{"name", "custom"}, {"path", "bad.json"}}}});
        std::string err;
        CHECK(run({"diagnose", "--config", cfg.string(), "--output", tmp.path.string()}, nullptr, &err) == 3);
        CHECK(err.find("validation failure") != std::string::npos);
    }

    TEST_CASE("a valid custom algebra resolves relative to the config") {
        TempDir tmp("custom");
        write_algebra_file(tmp.path / "alg.json", random_algebra(5, 4).arrays());
        const auto cfg = write_config(tmp.path, {{"instance", {{"name", "custom"}, {"path", "alg.json"}}}});
        CHECK(run({"diagnose", "--config", cfg.string(), "--output", tmp.path.string()}) == 0);
    }

    TEST_CASE("the report lists identities in order") {
        const DiagnosticsReport r = run_diagnostics(rigid_body(1, 2, 3), true, 1, 10);
        REQUIRE(r.identities.size() == identity_names().size());
        for (std::size_t i = 0; i < r.identities.size(); ++i) CHECK(r.identities[i].name == identity_names()[i]);
        CHECK(r.passed());
        const DiagnosticsReport rnd = run_diagnostics(random_algebra(11, 5), false, 1, 20);
        CHECK(rnd.passed());
        CHECK_FALSE(rnd.identities.back().tolerance_bearing);
        CHECK(rnd.jacobi.fraction_above_1e3 > 0.9);
    }
}

TEST_SUITE("command line") {
    TEST_CASE("help, instances and bad usage") {
        std::string out;
        CHECK(run({"--help"}, &out) == 0);
        CHECK(out.find("simulate") != std::string::npos);
        CHECK(run({"instances"}, &out) == 0);
        for (const auto& name : instance_names()) CHECK(out.find(name) != std::string::npos);
        CHECK(run({"frobnicate"}) == 1);
        CHECK(run({}) == 1);
        CHECK(run({"simulate"}) == 1);
    }

    TEST_CASE("format_double round-trips") {
        for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(format_double(v)) == v);
        CHECK(format_double(7.0) == "7");
    }
}
