#include "spinsim/collective.hpp"

#include <cmath>
#include <stdexcept>

namespace spinsim {

namespace {

using Cplx = std::complex<double>;

// Collective spin operators in the Dicke basis, index a -> m = a - n/2.
struct DickeOps {
    Eigen::MatrixXcd jx, jy, jz;

    explicit DickeOps(int n) {
        const int dim = n + 1;
        const double s = 0.5 * n;
        Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(dim, dim);
        jz = Eigen::MatrixXcd::Zero(dim, dim);
        for (int a = 0; a < dim; ++a) {
            double m = a - s;
            jz(a, a) = m;
            if (a + 1 < dim) jp(a + 1, a) = std::sqrt(s * (s + 1) - m * (m + 1));
        }
        jx = 0.5 * (jp + jp.adjoint());
        jy = Cplx(0, -0.5) * (jp - jp.adjoint());
    }
};

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

void DickeState::to_density() {
    if (!pure) return;
    rho = amps * amps.adjoint();
    pure = false;
    amps.resize(0);
}

void DickeState::validate() const {
    if (n < 1) throw std::invalid_argument("DickeState: n must be >= 1");
    if (pure) {
        if (amps.size() != n + 1) throw std::invalid_argument("DickeState: bad amplitude size");
        if (std::abs(amps.squaredNorm() - 1.0) > 1e-10)
            throw std::invalid_argument("DickeState: amplitudes not normalized");
    } else {
        if (rho.rows() != n + 1 || rho.cols() != n + 1)
            throw std::invalid_argument("DickeState: bad density size");
        if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
            throw std::invalid_argument("DickeState: trace != 1");
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("DickeState: density not Hermitian");
    }
}

DickeState css_dicke(int n) {
    if (n < 1) throw std::invalid_argument("css_dicke: n must be >= 1");
    DickeState s;
    s.n = n;
    s.amps.resize(n + 1);
    const double log2half = 0.5 * n * std::log(2.0);
    for (int a = 0; a <= n; ++a)
        s.amps(a) = std::exp(0.5 * log_binomial(n, a) - log2half);
    return s;
}

DickeState evolve_oat(const DickeState& s, double chi, double t) {
    DickeState out = s;
    const double half_n = 0.5 * s.n;
    if (s.pure) {
        for (int a = 0; a <= s.n; ++a) {
            double m = a - half_n;
            out.amps(a) *= std::exp(Cplx(0, -chi * t * m * m));
        }
    } else {
        for (int a = 0; a <= s.n; ++a)
            for (int b = 0; b <= s.n; ++b) {
                double ma = a - half_n, mb = b - half_n;
                out.rho(a, b) *= std::exp(Cplx(0, -chi * t * (ma * ma - mb * mb)));
            }
    }
    return out;
}

DickeState dephase_dicke(const DickeState& s, double gamma_z, double t) {
    if (gamma_z * t < 0.0) throw std::invalid_argument("dephase_dicke: gamma_z * t must be >= 0");
    DickeState out = s;
    out.to_density();
    const double half_n = 0.5 * s.n;
    for (int a = 0; a <= s.n; ++a)
        for (int b = 0; b <= s.n; ++b) {
            double d = (a - half_n) - (b - half_n);
            out.rho(a, b) *= std::exp(-0.5 * gamma_z * t * d * d);
        }
    return out;
}

DickeState rotate_dicke(const DickeState& s, double theta, double phi) {
    DickeOps ops(s.n);
    Eigen::MatrixXcd gen = std::cos(phi) * ops.jx + std::sin(phi) * ops.jy;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gen);
    Eigen::VectorXcd phases(s.n + 1);
    for (int a = 0; a <= s.n; ++a)
        phases(a) = std::exp(Cplx(0, -theta * es.eigenvalues()(a)));
    Eigen::MatrixXcd r =
        es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    DickeState out = s;
    if (s.pure)
        out.amps = r * s.amps;
    else
        out.rho = r * s.rho * r.adjoint();
    return out;
}

CollectiveMoments dicke_moments(const DickeState& s) {
    DickeOps ops(s.n);
    const Eigen::MatrixXcd* j[3] = {&ops.jx, &ops.jy, &ops.jz};
    CollectiveMoments m;
    if (s.pure) {
        Eigen::MatrixXcd v(s.n + 1, 3);
        for (int a = 0; a < 3; ++a) v.col(a) = (*j[a]) * s.amps;
        for (int a = 0; a < 3; ++a) {
            m.mean(a) = s.amps.dot(v.col(a)).real();
            for (int b = 0; b < 3; ++b)
                m.second(a, b) = v.col(a).dot(v.col(b)).real();
        }
    } else {
        for (int a = 0; a < 3; ++a) {
            m.mean(a) = ((*j[a]) * s.rho).trace().real();
            for (int b = 0; b < 3; ++b)
                m.second(a, b) = ((*j[a]) * s.rho * (*j[b])).trace().real();
        }
    }
    // enforce exact symmetry of the symmetrized table
    m.second = 0.5 * (m.second + m.second.transpose()).eval();
    return m;
}

Eigen::VectorXd dicke_magnetization_histogram(const DickeState& s) {
    Eigen::VectorXd p(s.n + 1);
    for (int a = 0; a <= s.n; ++a)
        p(a) = s.pure ? std::norm(s.amps(a)) : s.rho(a, a).real();
    return p;
}

CollectiveMoments decay_replacements(const CollectiveMoments& m, ModelKind kind,
                                     double gamma_z, double t) {
    if (kind == ModelKind::PLTFI)
        throw std::invalid_argument(
            "decay_replacements: TFI jump operator does not commute with the Hamiltonian");
    if (gamma_z * t < 0.0) throw std::invalid_argument("decay_replacements: gamma_z * t < 0");
    const double e1 = std::exp(-0.5 * gamma_z * t);  // single-coherence decay
    const double e2 = std::exp(-2.0 * gamma_z * t);  // double-coherence decay
    CollectiveMoments out = m;
    out.mean(AX) *= e1;
    out.mean(AY) *= e1;
    out.second(AX, AZ) *= e1;
    out.second(AZ, AX) *= e1;
    out.second(AY, AZ) *= e1;
    out.second(AZ, AY) *= e1;
    const double sum_xy = m.second(AX, AX) + m.second(AY, AY);
    const double dif_xy = m.second(AX, AX) - m.second(AY, AY);
    out.second(AX, AX) = 0.5 * (sum_xy + e2 * dif_xy);
    out.second(AY, AY) = 0.5 * (sum_xy - e2 * dif_xy);
    out.second(AX, AY) *= e2;
    out.second(AY, AX) *= e2;
    return out;
}

MomentTable ising_correlators(const CouplingMatrix& c, double t) {
    c.validate();
    const int n = c.n;
    MomentTable out(n);
    out.set_same_site_pauli();

    // <sigma_i^x> = prod_{l != i} cos(J_il t); y and z first moments vanish.
    for (int i = 0; i < n; ++i) {
        double prod = 1.0;
        for (int l = 0; l < n; ++l)
            if (l != i) prod *= std::cos(c.j(i, l) * t);
        out.first(i, AX) = prod;
    }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double prod_plus = 1.0, prod_minus = 1.0, prod_i = 1.0, prod_j = 1.0;
            for (int l = 0; l < n; ++l) {
                if (l == i || l == j) continue;
                prod_plus *= std::cos((c.j(i, l) + c.j(j, l)) * t);
                prod_minus *= std::cos((c.j(i, l) - c.j(j, l)) * t);
                prod_i *= std::cos(c.j(i, l) * t);
                prod_j *= std::cos(c.j(j, l) * t);
            }
            out.second(i, AX, j, AX) = 0.5 * (prod_minus + prod_plus);
            out.second(i, AY, j, AY) = 0.5 * (prod_minus - prod_plus);
            out.second(i, AY, j, AZ) = std::sin(c.j(i, j) * t) * prod_i;
            out.second(i, AZ, j, AY) = std::sin(c.j(i, j) * t) * prod_j;
            // xz, xy and zz correlators vanish for all times
        }
    return out;
}

}  // namespace spinsim
