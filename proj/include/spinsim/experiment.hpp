#ifndef SPINSIM_EXPERIMENT_HPP
#define SPINSIM_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinsim/coupling.hpp"

namespace spinsim {
namespace expt {

enum class Engine { Auto, Dicke, Ed, Dtwa };

std::string to_string(Engine e);
Engine engine_from_string(const std::string& s);

/// One full experiment: model source, schedule, engine choice, observables
/// and output destination. Serializes to/from the JSON config format; keys
/// of physical quantities carry explicit unit suffixes.
struct ExperimentSpec {
    ModelKind kind = ModelKind::PLXX;
    int n = 2;
    double j0 = 0.0;                 // rad/s, power-law builds
    double alpha = 1.0;
    std::string coupling_file;       // overrides (n, j0, alpha) when set
    std::optional<double> chi;       // rad/s, OAT; defaults to jbar of couplings
    double b_field = 0.0;            // rad/s, TFI
    double gamma_z = 0.0;            // 1/s

    Schedule schedule;
    Engine engine = Engine::Auto;
    int trajectories = 5000;
    std::uint64_t master_seed = 1;
    int workers = 1;                 // 0 = hardware concurrency
    std::vector<std::string> observables;  // squeezing, bloch, total_spin,
                                           // spin_waves, husimi, ghz,
                                           // magnetization, ramsey
    std::string out_dir = "out";
    std::string preset_name;         // provenance, empty for ad-hoc configs
    bool xcheck = false;             // also run the exact oracle and report the gap

    struct SweepDef {
        std::string axis;            // n, alpha, j0, gamma_z, t
        std::vector<double> values;
    };
    std::optional<SweepDef> sweep;

    ModelSpec build_model() const;
    Engine resolve_engine() const;   // pure function of (kind, n, gamma_z)
    void validate() const;

    std::string to_json() const;
    static ExperimentSpec from_json(const std::string& text);
    static ExperimentSpec from_config_file(const std::string& path);
};

struct RunSummary {
    Engine engine = Engine::Auto;
    double dt = 0.0;                  // integrator step (dtwa)
    double wall_time_s = 0.0;
    double min_xi2_db = 0.0;          // over sample times, when squeezing requested
    double t_at_min_xi2 = 0.0;
    double max_gap_db = 0.0;          // xcheck runs
    std::string timeseries_path;
    std::string summary_path;
};

/// Runs the experiment (or its sweep), writing <out>/timeseries.csv,
/// <out>/summary.json and any requested grid files. Same spec + seed gives
/// byte-identical CSV regardless of worker count.
RunSummary run_experiment(const ExperimentSpec& spec);

/// Runs one experiment per value of the swept axis into subdirectories of
/// spec.out_dir and writes an aggregate CSV.
void run_sweep(const ExperimentSpec& spec, const std::string& axis,
               const std::vector<double>& values);

std::vector<std::string> list_presets();
ExperimentSpec preset(const std::string& name);

}  // namespace expt
}  // namespace spinsim

#endif
