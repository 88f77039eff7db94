#ifndef SPINSIM_ED_HPP
#define SPINSIM_ED_HPP

#include <Eigen/Dense>
#include <complex>

#include "spinsim/coupling.hpp"
#include "spinsim/moments.hpp"

namespace spinsim {
namespace ed {

inline constexpr int kMaxPureSites = 14;
inline constexpr int kMaxDensitySites = 8;

/// Full 2^n state vector in the computational z-basis, site 0 = LSB,
/// bit value 1 = spin up.
struct PureState {
    int n = 0;
    Eigen::VectorXcd amps;  // 2^n

    void validate() const;
};

/// Full 2^n x 2^n density matrix.
struct DensityState {
    int n = 0;
    Eigen::MatrixXcd rho;

    void validate() const;
};

PureState css_pure(int n);
DensityState css_density(int n);

/// (|up..up> + e^{i phase} |down..down>) / sqrt(2).
PureState ghz_target(int n, double phase = 0.0);

/// H |in>, matrix-free.
void apply_hamiltonian(const ModelSpec& m, const Eigen::VectorXcd& in,
                       Eigen::VectorXcd& out);

/// exp(-i H t) |s> via diagonal phases (OAT, Ising) or a Lanczos
/// propagator (XX, TFI). Requires m.gamma_z == 0.
PureState evolve_unitary(const PureState& s, const ModelSpec& m, double t);

/// Master-equation evolution with collective jump operator S_z at rate
/// m.gamma_z, via an Arnoldi propagator on the vectorized density matrix.
DensityState evolve_lindblad(const DensityState& r, const ModelSpec& m, double t);

/// exp(+i b t sum_i sigma_i^z): undoes the transverse-drive rotation so TFI
/// output is comparable with the XX frame.
PureState rotating_frame(const PureState& s, double b, double t);

/// Collective rotation R(theta, phi) = prod_j exp(-i theta/2
/// (sigma_j^x cos phi + sigma_j^y sin phi)).
PureState rotate_pure(const PureState& s, double theta, double phi);

MomentTable measure_moments(const PureState& s);
MomentTable measure_moments(const DensityState& r);

double energy(const ModelSpec& m, const PureState& s);

/// |<a|b>|^2.
double fidelity(const PureState& a, const PureState& b);

/// p(m_z) histogram over magnetization sectors, index k = number of up
/// spins (m = k - n/2).
Eigen::VectorXd magnetization_histogram(const PureState& s);
Eigen::VectorXd magnetization_histogram(const DensityState& r);

}  // namespace ed
}  // namespace spinsim

#endif
