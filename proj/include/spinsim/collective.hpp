#ifndef SPINSIM_COLLECTIVE_HPP
#define SPINSIM_COLLECTIVE_HPP

#include <Eigen/Dense>
#include <complex>

#include "spinsim/coupling.hpp"
#include "spinsim/moments.hpp"

namespace spinsim {

/// State in the maximal-spin (Dicke) manifold, dimension n+1, indexed by
/// a = 0..n with magnetization m = a - n/2. Pure amplitude form by default;
/// switches to a density matrix once dephasing is applied.
struct DickeState {
    int n = 0;
    Eigen::VectorXcd amps;  // n+1, valid when pure
    Eigen::MatrixXcd rho;   // (n+1)x(n+1), valid when !pure
    bool pure = true;

    double magnetization(int a) const { return a - 0.5 * n; }
    /// Promotes the amplitude form to a density matrix.
    void to_density();
    void validate() const;
};

/// CSS polarized along +x: amps[a] = sqrt(C(n, a)) / 2^(n/2).
DickeState css_dicke(int n);

/// One-axis twisting phase evolution: amps[a] *= exp(-i chi t m^2). The
/// constant energy offset of the pairwise form is dropped as a global phase.
DickeState evolve_oat(const DickeState& s, double chi, double t);

/// Collective dephasing at rate gamma_z for time t:
/// rho[a][b] *= exp(-gamma_z t (m_a - m_b)^2 / 2). Returns density form.
DickeState dephase_dicke(const DickeState& s, double gamma_z, double t);

/// Collective rotation exp(-i theta (S_x cos phi + S_y sin phi)).
DickeState rotate_dicke(const DickeState& s, double theta, double phi);

/// <S_a> and symmetrized <S_a S_b> of a Dicke state.
CollectiveMoments dicke_moments(const DickeState& s);

/// p(m) over magnetization sectors.
Eigen::VectorXd dicke_magnetization_histogram(const DickeState& s);

/// Analytic effect of collective dephasing on moments of dynamics whose
/// Hamiltonian commutes with S_z. Throws for kind == PLTFI.
CollectiveMoments decay_replacements(const CollectiveMoments& m, ModelKind kind,
                                     double gamma_z, double t);

/// Closed-form one- and two-body correlators of the power-law Ising chain
/// evolved from the +x CSS (trigonometric product formulas).
MomentTable ising_correlators(const CouplingMatrix& c, double t);

}  // namespace spinsim

#endif
