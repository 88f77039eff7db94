#ifndef SPINSIM_SRC_KRYLOV_HPP
#define SPINSIM_SRC_KRYLOV_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <unsupported/Eigen/MatrixFunctions>

namespace spinsim::detail {

/// y = exp(t A) v via an Arnoldi propagator with fixed substeps chosen so
/// that ||A|| * tau <= 6 per substep, Krylov dimension up to 40. anorm is an
/// upper estimate of ||A|| (row-sum bound is fine).
inline Eigen::VectorXcd krylov_expv(
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
    Eigen::VectorXcd v, double t, double anorm, int m_max = 40) {
    using Eigen::MatrixXcd;
    using Eigen::VectorXcd;

    if (t == 0.0) return v;
    const auto dim = v.size();
    const int m = static_cast<int>(std::min<Eigen::Index>(m_max, dim));
    const double tau_max = anorm > 0 ? 6.0 / anorm : std::abs(t);
    const int nsub = std::max(1, static_cast<int>(std::ceil(std::abs(t) / tau_max)));
    const double tau = t / nsub;

    MatrixXcd basis(dim, m + 1);
    MatrixXcd h = MatrixXcd::Zero(m + 1, m + 1);
    VectorXcd w(dim);

    for (int step = 0; step < nsub; ++step) {
        double beta = v.norm();
        if (beta == 0.0) return v;
        basis.col(0) = v / beta;
        h.setZero();
        int used = m;
        for (int k = 0; k < m; ++k) {
            apply(basis.col(k), w);
            // modified Gram-Schmidt with one reorthogonalization pass
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i <= k; ++i) {
                    std::complex<double> c = basis.col(i).dot(w);
                    h(i, k) += c;
                    w -= c * basis.col(i);
                }
            double nw = w.norm();
            h(k + 1, k) = nw;
            if (nw < 1e-14 * anorm || nw == 0.0) {  // happy breakdown
                used = k + 1;
                break;
            }
            basis.col(k + 1) = w / nw;
        }
        MatrixXcd hm = h.topLeftCorner(used, used);
        MatrixXcd e = (tau * hm).exp();
        v = beta * (basis.leftCols(used) * e.col(0));
    }
    return v;
}

}  // namespace spinsim::detail

#endif
