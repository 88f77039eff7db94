// Command-line front end for the spinsim shared library. Talks to the core
// exclusively through the C API.
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinsim/spinsim_c.h"

namespace {

struct Overrides {
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = -1;
    int trajectories = -1;
    std::string out_dir;
    std::string engine;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Master RNG seed")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--workers", o.workers, "Worker threads (0 = hardware)");
    cmd->add_option("--trajectories", o.trajectories, "Trajectory count (dtwa)");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--engine", o.engine, "Engine: auto, dicke, ed or dtwa")
        ->check(CLI::IsMember({"auto", "dicke", "ed", "dtwa"}));
}

int fail(int rc) {
    std::fprintf(stderr, "error: %s\n", spinsim_last_error());
    return rc;
}

int apply_overrides(spinsim_experiment* h, const Overrides& o) {
    int rc = SPINSIM_OK;
    if (o.seed_set) rc = spinsim_experiment_set_seed(h, o.seed);
    if (rc == SPINSIM_OK && o.workers >= 0)
        rc = spinsim_experiment_set_workers(h, o.workers);
    if (rc == SPINSIM_OK && o.trajectories >= 1)
        rc = spinsim_experiment_set_trajectories(h, o.trajectories);
    if (rc == SPINSIM_OK && !o.out_dir.empty())
        rc = spinsim_experiment_set_out_dir(h, o.out_dir.c_str());
    if (rc == SPINSIM_OK && !o.engine.empty())
        rc = spinsim_experiment_set_engine(h, o.engine.c_str());
    return rc;
}

int run_handle(spinsim_experiment* h, const Overrides& o, bool show_only) {
    int rc = apply_overrides(h, o);
    if (rc != SPINSIM_OK) return fail(rc);
    if (show_only) {
        char* text = nullptr;
        rc = spinsim_experiment_to_json(h, &text);
        if (rc != SPINSIM_OK) return fail(rc);
        std::printf("%s\n", text);
        spinsim_string_free(text);
        return 0;
    }
    rc = spinsim_experiment_run(h);
    if (rc != SPINSIM_OK) return fail(rc);
    char* text = nullptr;
    if (spinsim_experiment_to_json(h, &text) == SPINSIM_OK) {
        std::printf("%s\n", text);
        spinsim_string_free(text);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spinsim: spin-chain entanglement dynamics simulator"};
    app.require_subcommand(1);

    // run --config FILE
    std::string config_path;
    Overrides run_over;
    CLI::App* run = app.add_subcommand("run", "Run an experiment from a JSON config");
    run->add_option("--config", config_path, "Path to a JSON experiment config")
        ->required();
    add_override_flags(run, run_over);

    // preset NAME [--show]
    std::string preset_name;
    bool preset_show = false;
    Overrides preset_over;
    CLI::App* pre = app.add_subcommand("preset", "Run a named preset");
    pre->add_option("name", preset_name, "Preset name")->required();
    pre->add_flag("--show", preset_show, "Print the resolved config without running");
    add_override_flags(pre, preset_over);

    // sweep --config FILE --axis NAME --values v1,v2,...
    std::string sweep_config, sweep_axis;
    std::vector<double> sweep_values;
    Overrides sweep_over;
    CLI::App* sw = app.add_subcommand("sweep", "Sweep one parameter of a config");
    sw->add_option("--config", sweep_config, "Path to a JSON experiment config")
        ->required();
    sw->add_option("--axis", sweep_axis, "Swept parameter: n, alpha, j0, gamma_z, t")
        ->required();
    sw->add_option("--values", sweep_values, "Values of the swept parameter")
        ->required()
        ->delimiter(',');
    add_override_flags(sw, sweep_over);

    CLI::App* lp = app.add_subcommand("list-presets", "List the preset catalogue");

    CLI11_PARSE(app, argc, argv);

    if (lp->parsed()) {
        size_t count = 0;
        int rc = spinsim_preset_count(&count);
        if (rc != SPINSIM_OK) return fail(rc);
        for (size_t i = 0; i < count; ++i) {
            char* name = nullptr;
            rc = spinsim_preset_name(i, &name);
            if (rc != SPINSIM_OK) return fail(rc);
            std::printf("%s\n", name);
            spinsim_string_free(name);
        }
        return 0;
    }

    spinsim_experiment* h = nullptr;
    int result = 1;
    if (run->parsed()) {
        int rc = spinsim_experiment_from_config(config_path.c_str(), &h);
        if (rc != SPINSIM_OK) return fail(rc);
        result = run_handle(h, run_over, false);
    } else if (pre->parsed()) {
        int rc = spinsim_experiment_from_preset(preset_name.c_str(), &h);
        if (rc != SPINSIM_OK) return fail(rc);
        result = run_handle(h, preset_over, preset_show);
    } else if (sw->parsed()) {
        int rc = spinsim_experiment_from_config(sweep_config.c_str(), &h);
        if (rc != SPINSIM_OK) return fail(rc);
        rc = apply_overrides(h, sweep_over);
        if (rc == SPINSIM_OK)
            rc = spinsim_experiment_sweep(h, sweep_axis.c_str(), sweep_values.data(),
                                          sweep_values.size());
        result = rc == SPINSIM_OK ? 0 : fail(rc);
    }
    spinsim_experiment_free(h);
    return result;
}
