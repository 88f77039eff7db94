#ifndef SPINSIM_OBSERVABLES_HPP
#define SPINSIM_OBSERVABLES_HPP

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "spinsim/collective.hpp"
#include "spinsim/ed.hpp"
#include "spinsim/moments.hpp"

namespace spinsim {
namespace obs {

struct Squeezing {
    double xi2 = 1.0;
    double db = 0.0;                 // 10 log10(xi2)
    Eigen::Vector3d axis = Eigen::Vector3d::UnitY();  // minimizing transverse axis
};

/// Wineland parameter via closed-form eigendecomposition of the 2x2
/// transverse covariance. Throws when the Bloch vector vanishes.
Squeezing squeezing_wineland(const CollectiveMoments& m, int n);
Squeezing squeezing_wineland(const MomentTable& t);

struct TotalSpin {
    double s2 = 0.0;
    double normalized = 0.0;  // s2 / (S(S+1)), S = n/2
};

TotalSpin total_spin(const MomentTable& t);
TotalSpin total_spin(const CollectiveMoments& m, int n);

/// Wavenumbers k_m = 2 pi m / n for integer m in (-n/2, n/2].
struct KGrid {
    std::vector<double> k;
    static KGrid lattice(int n);
};

struct SpinWaves {
    std::vector<double> occupation;  // <C_k> per grid point
    double k0 = 0.0;                 // collective mode
    double sum_k_nonzero = 0.0;
};

/// Spin-wave occupations from two-point correlators:
/// <C_k> = 1/2 - (1/2N) sum_i <sx_i>
///       + (1/2N) sum_{i<j} <sy_i sy_j + sz_i sz_j> cos(k (r_i - r_j)).
SpinWaves spin_wave_occupations(const MomentTable& t,
                                const std::vector<double>& positions,
                                const KGrid& g);

/// Husimi Q sampling grid over the collective Bloch sphere.
struct QGrid {
    std::vector<double> theta;  // polar, [0, pi]
    std::vector<double> phi;    // azimuth, [0, 2 pi)
    Eigen::MatrixXd q;          // theta.size() x phi.size()

    static QGrid uniform(int n_theta = 64, int n_phi = 128);
    /// (N+1)/(4 pi) integral of Q over the sphere (trapezoid in theta,
    /// periodic rectangle in phi); 1 for a normalized state.
    double normalization(int n) const;
};

/// Q(theta, phi) = <n(theta,phi)| rho |n(theta,phi)> against the coherent
/// state pointing along (theta, phi). Exact-engine states only.
void husimi_q(const DickeState& s, QGrid& g);
void husimi_q(const ed::PureState& s, QGrid& g);
void husimi_q(const ed::DensityState& r, QGrid& g);

/// Counts distinct local maxima of Q along the equator (theta = pi/2),
/// cyclic in phi. `rel_threshold` discards ripples below that fraction of
/// the global equatorial maximum.
int equator_peak_count(const QGrid& g, double rel_threshold = 0.2);

struct ParityScan {
    std::vector<double> parity;  // one per phase
    double contrast = 0.0;       // amplitude of the period-2pi/N sinusoid
};

/// Parity <P_phi> after a final R(pi/2, phi) readout pulse, for an aligned
/// cat state; contrast from a linear least-squares fit at fixed period.
ParityScan parity_scan(const DickeState& s, const std::vector<double>& phases);
ParityScan parity_scan(const ed::PureState& s, const std::vector<double>& phases);

struct GhzFidelity {
    double f = 0.0;
    bool witness = false;  // f > 0.5 certifies N-partite entanglement
};

/// F = (p_top + p_bottom + contrast) / 2.
GhzFidelity ghz_fidelity(double p_top, double p_bottom, double contrast);

/// Fidelity to the GHZ state, maximized over the cat-alignment azimuth and
/// the relative phase of the target superposition.
double ghz_fidelity_aligned(const ed::PureState& s);
double ghz_fidelity_aligned(const DickeState& s);

struct RamseyMse {
    std::vector<double> mse;  // MSE(phi) on the requested grid
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;  // fit of phi^2 + a1 phi sin phi + a2 sin^2 phi + a3 cos^2 phi
    double db_phi0 = 0.0;     // 10 log10(a3)
};

/// MSE(phi) = phi^2 - 2 phi <S_y>_phi / |<S>| + <S_y^2>_phi / |<S>|^2 for a
/// prepared state described by its collective moments (Bloch vector along
/// +x, squeezed quadrature along y after alignment).
RamseyMse ramsey_mse(const CollectiveMoments& m, const std::vector<double>& phis);

/// Rotates moments so the Bloch vector lies along +x and the minimum
/// transverse variance direction along y (Ramsey alignment).
CollectiveMoments align_for_ramsey(const CollectiveMoments& m);

/// Leave-one-out jackknife standard error of a statistic over samples.
double jackknife_error(std::span<const double> samples,
                       const std::function<double(std::span<const double>)>& statistic);

}  // namespace obs
}  // namespace spinsim

#endif
