#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "spinsim/experiment.hpp"

using namespace spinsim;
using namespace spinsim::expt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ExperimentSpec tiny_xx() {
    ExperimentSpec s;
    s.kind = ModelKind::PLXX;
    s.n = 4;
    s.j0 = 560.0;
    s.alpha = 1.0;
    s.schedule = Schedule::uniform(0.5e-3, 2);
    s.observables = {"squeezing", "bloch", "total_spin"};
    return s;
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("preset catalogue") {
    auto names = list_presets();
    for (const char* expect :
         {"fig1c-n12", "fig1c-n51", "fig1d-scaling", "fig2-spinwaves",
          "fig3-cats", "fig4-ramsey-n51", "oat-scaling", "sql-check",
          "oracle-xcheck-n8"})
        CHECK(std::find(names.begin(), names.end(), expect) != names.end());
    CHECK_THROWS_AS(preset("not-a-preset"), std::out_of_range);
    for (const auto& n : names) CHECK_NOTHROW(preset(n).validate());
}

TEST_CASE("JSON serialization round-trips every preset") {
    for (const auto& name : list_presets()) {
        auto a = preset(name);
        auto b = ExperimentSpec::from_json(a.to_json());
        CHECK(a.to_json() == b.to_json());
    }
}

TEST_CASE("engine resolution rules") {
    auto s = tiny_xx();
    CHECK(s.resolve_engine() == Engine::Ed);  // small, no dephasing
    s.gamma_z = 29.4;
    CHECK(s.resolve_engine() == Engine::Dtwa);  // dissipative
    s.gamma_z = 0.0;
    s.n = 51;
    CHECK(s.resolve_engine() == Engine::Dtwa);  // too large for ed
    s.kind = ModelKind::OAT;
    CHECK(s.resolve_engine() == Engine::Dicke);
    s.kind = ModelKind::PLIsing;
    CHECK(s.resolve_engine() == Engine::Dicke);
    s.engine = Engine::Ed;  // explicit choice wins
    CHECK(s.resolve_engine() == Engine::Ed);
}

TEST_CASE("validation refuses incompatible observable/engine pairs") {
    auto s = tiny_xx();
    s.n = 20;  // forces dtwa
    s.observables = {"husimi"};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.observables = {"ghz"};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.observables = {"squeezing"};
    CHECK_NOTHROW(s.validate());

    auto ising = tiny_xx();
    ising.kind = ModelKind::PLIsing;
    ising.observables = {"magnetization"};  // correlator engine has no state
    CHECK_THROWS_AS(ising.validate(), std::invalid_argument);
    ising.engine = Engine::Ed;
    CHECK_NOTHROW(ising.validate());

    auto bad = tiny_xx();
    bad.observables = {"entropy"};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.observables = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("unknown config keys and malformed JSON are rejected") {
    CHECK_THROWS(ExperimentSpec::from_json("{"));
    CHECK_THROWS(ExperimentSpec::from_config_file("/nonexistent/config.json"));
}

TEST_CASE("run writes timeseries, summary, and is reproducible byte for byte") {
    auto s = tiny_xx();
    auto dir = fresh_dir("spinsim_test_run");
    s.out_dir = dir.string();
    auto rs = run_experiment(s);
    CHECK(rs.engine == Engine::Ed);
    CHECK(fs::exists(dir / "timeseries.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    auto csv = slurp(dir / "timeseries.csv");
    CHECK(csv.find("t_s") != std::string::npos);
    CHECK(csv.find("xi2_db") != std::string::npos);
    auto summary = slurp(dir / "summary.json");
    CHECK(summary.find("min_xi2_db") != std::string::npos);
    CHECK(summary.find("\"engine\": \"ed\"") != std::string::npos);

    auto again = fresh_dir("spinsim_test_run2");
    s.out_dir = again.string();
    run_experiment(s);
    CHECK(slurp(again / "timeseries.csv") == csv);
    fs::remove_all(dir);
    fs::remove_all(again);
}

TEST_CASE("trajectory runs are byte-identical across worker counts") {
    ExperimentSpec s = tiny_xx();
    s.n = 5;
    s.gamma_z = 29.4;  // forces the trajectory engine
    s.trajectories = 300;
    s.observables = {"squeezing", "bloch"};
    std::string first;
    for (int workers : {1, 3}) {
        s.workers = workers;
        auto dir = fresh_dir("spinsim_test_workers" + std::to_string(workers));
        s.out_dir = dir.string();
        run_experiment(s);
        auto csv = slurp(dir / "timeseries.csv");
        if (first.empty())
            first = csv;
        else
            CHECK(csv == first);
        fs::remove_all(dir);
    }
}

TEST_CASE("requested grid files appear") {
    auto s = tiny_xx();
    s.n = 6;
    s.observables = {"squeezing", "spin_waves"};
    auto dir = fresh_dir("spinsim_test_kgrid");
    s.out_dir = dir.string();
    run_experiment(s);
    CHECK(fs::exists(dir / "kgrid.csv"));
    fs::remove_all(dir);

    ExperimentSpec c;
    c.kind = ModelKind::OAT;
    c.n = 6;
    c.chi = 500.0;
    c.schedule.t_end = 1e-3;
    c.schedule.sample_times = {1e-3};
    c.observables = {"husimi"};
    auto dir2 = fresh_dir("spinsim_test_qgrid");
    c.out_dir = dir2.string();
    run_experiment(c);
    CHECK(fs::exists(dir2 / "qgrid.csv"));
    fs::remove_all(dir2);
}

TEST_CASE("cross-check runs report the oracle gap") {
    auto s = tiny_xx();
    s.n = 5;
    s.gamma_z = 0.0;
    s.engine = Engine::Dtwa;
    s.trajectories = 2000;
    s.xcheck = true;
    auto dir = fresh_dir("spinsim_test_xcheck");
    s.out_dir = dir.string();
    auto rs = run_experiment(s);
    CHECK(rs.max_gap_db < 1.0);  // tiny system, early times
    auto summary = slurp(dir / "summary.json");
    CHECK(summary.find("max_squeezing_gap_db") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("sweep produces one run per value plus an aggregate table") {
    auto s = tiny_xx();
    s.kind = ModelKind::OAT;
    s.chi = 500.0;
    auto dir = fresh_dir("spinsim_test_sweep");
    s.out_dir = dir.string();
    run_sweep(s, "n", {4, 6});
    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(fs::exists(dir / "n=4" / "timeseries.csv"));
    CHECK(fs::exists(dir / "n=6" / "timeseries.csv"));
    auto agg = slurp(dir / "sweep.csv");
    CHECK(agg.find("min_xi2_db") != std::string::npos);
    CHECK_THROWS_AS(run_sweep(s, "flux", {1.0}), std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("engine names round-trip") {
    for (auto e : {Engine::Auto, Engine::Dicke, Engine::Ed, Engine::Dtwa})
        CHECK(engine_from_string(to_string(e)) == e);
    CHECK_THROWS_AS(engine_from_string("gpu"), std::invalid_argument);
}
