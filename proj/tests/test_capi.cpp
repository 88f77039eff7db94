#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "spinsim/spinsim_c.h"

namespace fs = std::filesystem;

namespace {

const char* kTinyConfig = R"({
  "model": {"kind": "xx", "n": 4, "j0_rad_per_s": 560.0, "alpha": 1.0,
            "gamma_z_per_s": 0.0},
  "schedule": {"t_end_s": 0.0005, "sample_times_s": [0.0, 0.00025, 0.0005]},
  "engine": "auto",
  "observables": ["squeezing", "bloch"]
})";

}  // namespace

TEST_CASE("library identification") {
    REQUIRE(spinsim_version() != nullptr);
    CHECK(std::strlen(spinsim_version()) > 0);
}

TEST_CASE("preset enumeration") {
    size_t count = 0;
    REQUIRE(spinsim_preset_count(&count) == SPINSIM_OK);
    CHECK(count >= 9);
    bool found = false;
    for (size_t i = 0; i < count; ++i) {
        char* name = nullptr;
        REQUIRE(spinsim_preset_name(i, &name) == SPINSIM_OK);
        REQUIRE(name != nullptr);
        if (std::string(name) == "fig1c-n12") found = true;
        spinsim_string_free(name);
    }
    CHECK(found);
    char* name = nullptr;
    CHECK(spinsim_preset_name(count + 10, &name) == SPINSIM_ERR_NOT_FOUND);
    CHECK(spinsim_preset_count(nullptr) == SPINSIM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("error reporting on failed construction") {
    spinsim_experiment* h = nullptr;
    CHECK(spinsim_experiment_from_preset("bogus", &h) == SPINSIM_ERR_NOT_FOUND);
    CHECK(h == nullptr);
    CHECK(std::strlen(spinsim_last_error()) > 0);

    CHECK(spinsim_experiment_from_json("{ not json", &h) ==
          SPINSIM_ERR_INVALID_ARGUMENT);
    CHECK(spinsim_experiment_from_config("/does/not/exist.json", &h) != SPINSIM_OK);
}

TEST_CASE("null handles are rejected, not dereferenced") {
    CHECK(spinsim_experiment_set_seed(nullptr, 1) == SPINSIM_ERR_INVALID_ARGUMENT);
    CHECK(spinsim_experiment_run(nullptr) == SPINSIM_ERR_INVALID_ARGUMENT);
    char* text = nullptr;
    CHECK(spinsim_experiment_to_json(nullptr, &text) == SPINSIM_ERR_INVALID_ARGUMENT);
    spinsim_experiment_free(nullptr);  // must be a harmless no-op
}

TEST_CASE("configuration round trip and overrides") {
    spinsim_experiment* h = nullptr;
    REQUIRE(spinsim_experiment_from_json(kTinyConfig, &h) == SPINSIM_OK);
    REQUIRE(h != nullptr);

    CHECK(spinsim_experiment_set_seed(h, 77) == SPINSIM_OK);
    CHECK(spinsim_experiment_set_workers(h, 2) == SPINSIM_OK);
    CHECK(spinsim_experiment_set_trajectories(h, 500) == SPINSIM_OK);
    CHECK(spinsim_experiment_set_engine(h, "ed") == SPINSIM_OK);
    CHECK(spinsim_experiment_set_engine(h, "warp") == SPINSIM_ERR_INVALID_ARGUMENT);
    CHECK(spinsim_experiment_set_trajectories(h, 0) == SPINSIM_ERR_INVALID_ARGUMENT);

    char* text = nullptr;
    REQUIRE(spinsim_experiment_to_json(h, &text) == SPINSIM_OK);
    std::string json(text);
    spinsim_string_free(text);
    CHECK(json.find("\"master_seed\": 77") != std::string::npos);
    CHECK(json.find("\"engine\": \"ed\"") != std::string::npos);

    spinsim_experiment* h2 = nullptr;
    REQUIRE(spinsim_experiment_from_json(json.c_str(), &h2) == SPINSIM_OK);
    char* text2 = nullptr;
    REQUIRE(spinsim_experiment_to_json(h2, &text2) == SPINSIM_OK);
    CHECK(json == text2);
    spinsim_string_free(text2);
    spinsim_experiment_free(h2);
    spinsim_experiment_free(h);
}

TEST_CASE("end-to-end run through the C interface") {
    spinsim_experiment* h = nullptr;
    REQUIRE(spinsim_experiment_from_json(kTinyConfig, &h) == SPINSIM_OK);
    fs::path dir = fs::temp_directory_path() / "spinsim_capi_run";
    fs::remove_all(dir);
    REQUIRE(spinsim_experiment_set_out_dir(h, dir.string().c_str()) == SPINSIM_OK);
    REQUIRE(spinsim_experiment_run(h) == SPINSIM_OK);
    CHECK(fs::exists(dir / "timeseries.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    spinsim_experiment_free(h);
    fs::remove_all(dir);
}

TEST_CASE("sweep through the C interface") {
    spinsim_experiment* h = nullptr;
    REQUIRE(spinsim_experiment_from_json(kTinyConfig, &h) == SPINSIM_OK);
    fs::path dir = fs::temp_directory_path() / "spinsim_capi_sweep";
    fs::remove_all(dir);
    REQUIRE(spinsim_experiment_set_out_dir(h, dir.string().c_str()) == SPINSIM_OK);
    double values[2] = {4.0, 5.0};
    REQUIRE(spinsim_experiment_sweep(h, "n", values, 2) == SPINSIM_OK);
    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(spinsim_experiment_sweep(h, "flux", values, 2) ==
          SPINSIM_ERR_INVALID_ARGUMENT);
    spinsim_experiment_free(h);
    fs::remove_all(dir);
}
