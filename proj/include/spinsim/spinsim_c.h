/*
 * C API for the spinsim library: opaque experiment handles plus integer
 * error codes. All functions returning int give SPINSIM_OK (0) on success;
 * on failure spinsim_last_error() holds a thread-local description.
 */
#ifndef SPINSIM_C_H
#define SPINSIM_C_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
    SPINSIM_OK = 0,
    SPINSIM_ERR_INVALID_ARGUMENT = 1,
    SPINSIM_ERR_NOT_FOUND = 2,
    SPINSIM_ERR_IO = 3,
    SPINSIM_ERR_RUNTIME = 4
};

typedef struct spinsim_experiment_s spinsim_experiment;

/* Construction */
int spinsim_experiment_from_config(const char* path, spinsim_experiment** out);
int spinsim_experiment_from_json(const char* json_text, spinsim_experiment** out);
int spinsim_experiment_from_preset(const char* name, spinsim_experiment** out);
void spinsim_experiment_free(spinsim_experiment* h);

/* Overrides applied before running */
int spinsim_experiment_set_seed(spinsim_experiment* h, uint64_t seed);
int spinsim_experiment_set_workers(spinsim_experiment* h, int workers);
int spinsim_experiment_set_trajectories(spinsim_experiment* h, int m_traj);
int spinsim_experiment_set_engine(spinsim_experiment* h, const char* engine);
int spinsim_experiment_set_out_dir(spinsim_experiment* h, const char* dir);

/* Serialized (resolved) configuration; free with spinsim_string_free. */
int spinsim_experiment_to_json(const spinsim_experiment* h, char** out_text);

/* Execution: writes timeseries.csv / summary.json under the out dir. */
int spinsim_experiment_run(spinsim_experiment* h);
int spinsim_experiment_sweep(spinsim_experiment* h, const char* axis,
                             const double* values, size_t count);

/* Preset catalogue */
int spinsim_preset_count(size_t* count);
int spinsim_preset_name(size_t index, char** out_name);

void spinsim_string_free(char* s);
const char* spinsim_last_error(void);
const char* spinsim_version(void);

#ifdef __cplusplus
}
#endif

#endif /* SPINSIM_C_H */
