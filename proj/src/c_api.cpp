#include "spinsim/spinsim_c.h"

#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "spinsim/experiment.hpp"

struct spinsim_experiment_s {
    spinsim::expt::ExperimentSpec spec;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

// Maps C++ exceptions from the core onto C error codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return SPINSIM_OK;
    } catch (const std::invalid_argument& e) {
        return set_error(SPINSIM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return set_error(SPINSIM_ERR_NOT_FOUND, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return set_error(SPINSIM_ERR_IO, e.what());
    } catch (const std::exception& e) {
        std::string msg = e.what();
        if (msg.find("cannot open") != std::string::npos ||
            msg.find("cannot write") != std::string::npos)
            return set_error(SPINSIM_ERR_IO, msg);
        return set_error(SPINSIM_ERR_RUNTIME, msg);
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int require(bool cond, const char* what) {
    if (!cond) return set_error(SPINSIM_ERR_INVALID_ARGUMENT, what);
    return SPINSIM_OK;
}

}  // namespace

extern "C" {

int spinsim_experiment_from_config(const char* path, spinsim_experiment** out) {
    if (int rc = require(path && out, "null argument")) return rc;
    return guarded([&] {
        auto* h = new spinsim_experiment_s{
            spinsim::expt::ExperimentSpec::from_config_file(path)};
        *out = h;
    });
}

int spinsim_experiment_from_json(const char* json_text, spinsim_experiment** out) {
    if (int rc = require(json_text && out, "null argument")) return rc;
    return guarded([&] {
        auto* h = new spinsim_experiment_s{
            spinsim::expt::ExperimentSpec::from_json(json_text)};
        *out = h;
    });
}

int spinsim_experiment_from_preset(const char* name, spinsim_experiment** out) {
    if (int rc = require(name && out, "null argument")) return rc;
    return guarded([&] {
        auto* h = new spinsim_experiment_s{spinsim::expt::preset(name)};
        *out = h;
    });
}

void spinsim_experiment_free(spinsim_experiment* h) { delete h; }

int spinsim_experiment_set_seed(spinsim_experiment* h, uint64_t seed) {
    if (int rc = require(h != nullptr, "null handle")) return rc;
    h->spec.master_seed = seed;
    return SPINSIM_OK;
}

int spinsim_experiment_set_workers(spinsim_experiment* h, int workers) {
    if (int rc = require(h != nullptr, "null handle")) return rc;
    if (int rc = require(workers >= 0, "workers must be >= 0")) return rc;
    h->spec.workers = workers;
    return SPINSIM_OK;
}

int spinsim_experiment_set_trajectories(spinsim_experiment* h, int m_traj) {
    if (int rc = require(h != nullptr, "null handle")) return rc;
    if (int rc = require(m_traj >= 1, "trajectories must be >= 1")) return rc;
    h->spec.trajectories = m_traj;
    return SPINSIM_OK;
}

int spinsim_experiment_set_engine(spinsim_experiment* h, const char* engine) {
    if (int rc = require(h && engine, "null argument")) return rc;
    return guarded([&] { h->spec.engine = spinsim::expt::engine_from_string(engine); });
}

int spinsim_experiment_set_out_dir(spinsim_experiment* h, const char* dir) {
    if (int rc = require(h && dir, "null argument")) return rc;
    h->spec.out_dir = dir;
    return SPINSIM_OK;
}

int spinsim_experiment_to_json(const spinsim_experiment* h, char** out_text) {
    if (int rc = require(h && out_text, "null argument")) return rc;
    return guarded([&] { *out_text = dup_string(h->spec.to_json()); });
}

int spinsim_experiment_run(spinsim_experiment* h) {
    if (int rc = require(h != nullptr, "null handle")) return rc;
    return guarded([&] { spinsim::expt::run_experiment(h->spec); });
}

int spinsim_experiment_sweep(spinsim_experiment* h, const char* axis,
                             const double* values, size_t count) {
    if (int rc = require(h && axis && values, "null argument")) return rc;
    if (int rc = require(count > 0, "sweep needs at least one value")) return rc;
    return guarded([&] {
        spinsim::expt::run_sweep(h->spec, axis,
                                 std::vector<double>(values, values + count));
    });
}

int spinsim_preset_count(size_t* count) {
    if (int rc = require(count != nullptr, "null argument")) return rc;
    return guarded([&] { *count = spinsim::expt::list_presets().size(); });
}

int spinsim_preset_name(size_t index, char** out_name) {
    if (int rc = require(out_name != nullptr, "null argument")) return rc;
    return guarded([&] {
        auto names = spinsim::expt::list_presets();
        if (index >= names.size()) throw std::out_of_range("preset index out of range");
        *out_name = dup_string(names[index]);
    });
}

void spinsim_string_free(char* s) { delete[] s; }

const char* spinsim_last_error(void) { return g_last_error.c_str(); }

const char* spinsim_version(void) { return "1.0.0"; }

}  // extern "C"
