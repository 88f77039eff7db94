#ifndef SPINSIM_COUPLING_HPP
#define SPINSIM_COUPLING_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace spinsim {

/// Symmetric pair-coupling matrix J_ij (rad/s) together with the site
/// coordinates of a 1D chain (lattice units). Immutable after construction.
struct CouplingMatrix {
    int n = 0;
    Eigen::MatrixXd j;          // n x n, symmetric, zero diagonal
    std::vector<double> positions;  // strictly increasing, size n

    void validate() const;  // throws std::invalid_argument on violation
};

/// J_ij = j0 * |i-k|^(-alpha) on an integer lattice 0..n-1.
/// alpha = 0 gives the uniform all-to-all limit.
CouplingMatrix power_law_couplings(int n, double j0, double alpha);

/// Reads a coupling CSV (N rows x N columns, optional leading
/// "# positions: ..." line). The matrix is symmetrized as (J + J^T)/2 and
/// the diagonal forced to zero; a warning goes to stderr if the relative
/// asymmetry exceeds 1e-9.
CouplingMatrix load_couplings(const std::string& path);

/// Writes the CSV format accepted by load_couplings, with shortest
/// round-trip decimals so a load of the written file is bit-exact.
void save_couplings(const CouplingMatrix& c, const std::string& path);

/// Jbar = sum_{i<j} J_ij / (n(n-1)/2).
double mean_coupling(const CouplingMatrix& c);

enum class ModelKind { OAT, PLIsing, PLXX, PLTFI };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

/// Which Hamiltonian to evolve plus its parameters. Couplings are unused
/// for OAT; chi is OAT-only; b_field is TFI-only. gamma_z is the collective
/// dephasing rate (1/s) applied on top of the coherent dynamics.
struct ModelSpec {
    ModelKind kind = ModelKind::PLXX;
    CouplingMatrix couplings;
    double chi = 0.0;       // rad/s, OAT
    double b_field = 0.0;   // rad/s, TFI
    double gamma_z = 0.0;   // 1/s

    int sites() const { return kind == ModelKind::OAT ? n_oat : couplings.n; }
    int n_oat = 0;  // site count for OAT (no coupling matrix needed)

    void validate() const;
};

/// Evolution window with the times at which observables are sampled.
struct Schedule {
    double t_end = 0.0;               // seconds
    std::vector<double> sample_times; // strictly increasing, within [0, t_end]

    void validate() const;
    static Schedule uniform(double t_end, int n_samples, bool include_zero = true);
};

/// T = pi / (q * jbar): time at which the q-headed cat appears.
double cat_time(int q, double jbar);

}  // namespace spinsim

#endif
