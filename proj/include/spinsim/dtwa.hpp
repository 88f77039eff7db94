#ifndef SPINSIM_DTWA_HPP
#define SPINSIM_DTWA_HPP

#include <vector>

#include "spinsim/coupling.hpp"
#include "spinsim/moments.hpp"
#include "spinsim/rng.hpp"

namespace spinsim {
namespace dtwa {

/// Classical spin configurations, spins[t*n*3 + i*3 + a].
struct TrajectoryEnsemble {
    int m_traj = 0;
    int n = 0;
    std::vector<double> spins;

    double& at(int traj, int site, int axis) {
        return spins[(static_cast<size_t>(traj) * n + site) * 3 + axis];
    }
    double at(int traj, int site, int axis) const {
        return spins[(static_cast<size_t>(traj) * n + site) * 3 + axis];
    }
};

/// Discrete Wigner sampling of the +x CSS: S^x = +1, S^y and S^z
/// independently +-1 with probability 1/2.
TrajectoryEnsemble sample_discrete_wigner(int n, int m_traj, const RngPlan& plan);

/// Deterministic mean-field drift for PL-XX / PL-TFI, written into deriv
/// (length 3n). Throws for other kinds.
void drift(const ModelSpec& model, const double* spins, double* deriv);

/// Largest rate entering the step bound: max(B, max_i sum_j |J_ij|, gamma_z).
double rate_scale(const ModelSpec& model);

/// Step bound used by the integrator (0.005 / rate_scale, a quarter of the classic
/// stability heuristic so per-spin norms hold to 1e-4 over ms-scale runs).
double max_step(const ModelSpec& model);

/// One Stratonovich Heun step of a single trajectory; dw is the collective
/// Wiener increment shared by all spins of the trajectory.
void heun_step(const ModelSpec& model, double* spins, double dt, double dw,
               std::vector<double>& scratch);

struct Result {
    std::vector<double> times;
    std::vector<MomentTable> tables;  // one per sample time
    /// Collective moments reduced per trajectory (classical products of the
    /// collective variables, same-site terms NOT replaced by Pauli algebra).
    /// This estimator exactly conserves the collective quantities the drift
    /// conserves and tracks the exact squeezing much closer than reducing
    /// the site-resolved table.
    std::vector<CollectiveMoments> collective;
    /// Per-block collective moments (blocks of trajectories in index order),
    /// inputs for jackknife error estimation: block_collective[time][block].
    std::vector<std::vector<CollectiveMoments>> block_collective;
    double dt = 0.0;        // step actually used
    int block_size = 0;
};

/// Integrates m_traj trajectories over the schedule and accumulates moment
/// tables at each sample time. Trajectories are farmed over `workers`
/// threads in fixed blocks; reduction order is fixed by block index, so the
/// result is bit-identical for any worker count.
Result run_dtwa(const ModelSpec& model, const Schedule& sched, int m_traj,
                const RngPlan& plan, int workers = 1);

}  // namespace dtwa
}  // namespace spinsim

#endif
