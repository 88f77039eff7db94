#include "spinsim/ed.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "krylov.hpp"

namespace spinsim {
namespace ed {

namespace {

using Cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

int popcount(std::uint64_t z) { return std::popcount(z); }

/// Matrix-free Hamiltonian application, built once per evolution.
struct HamOp {
    int n;
    size_t dim;
    struct Pair {
        std::uint64_t mask;
        double j;
    };
    std::vector<Pair> pairs;  // off-diagonal exchange / flip-flip terms
    VectorXd diag;            // diagonal part
    bool exchange_only = false;  // XX: hop only between anti-aligned bits
    double norm_bound = 0.0;

    HamOp(const ModelSpec& m) : n(m.sites()), dim(size_t{1} << m.sites()) {
        m.validate();
        diag = VectorXd::Zero(dim);
        double pair_sum = 0.0;
        switch (m.kind) {
            case ModelKind::OAT:
                for (size_t z = 0; z < dim; ++z) {
                    double sz2 = 2.0 * popcount(z) - n;
                    diag(z) = 0.25 * m.chi * (sz2 * sz2 - n);
                }
                break;
            case ModelKind::PLIsing:
                for (size_t z = 0; z < dim; ++z) {
                    double e = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int k = i + 1; k < n; ++k) {
                            double si = (z >> i) & 1 ? 1.0 : -1.0;
                            double sk = (z >> k) & 1 ? 1.0 : -1.0;
                            e += m.couplings.j(i, k) * si * sk;
                        }
                    diag(z) = 0.5 * e;
                }
                break;
            case ModelKind::PLXX:
                exchange_only = true;
                for (int i = 0; i < n; ++i)
                    for (int k = i + 1; k < n; ++k)
                        if (m.couplings.j(i, k) != 0.0) {
                            pairs.push_back({(std::uint64_t{1} << i) | (std::uint64_t{1} << k),
                                             m.couplings.j(i, k)});
                            pair_sum += std::abs(m.couplings.j(i, k));
                        }
                break;
            case ModelKind::PLTFI:
                for (int i = 0; i < n; ++i)
                    for (int k = i + 1; k < n; ++k)
                        if (m.couplings.j(i, k) != 0.0) {
                            pairs.push_back({(std::uint64_t{1} << i) | (std::uint64_t{1} << k),
                                             m.couplings.j(i, k)});
                            pair_sum += std::abs(m.couplings.j(i, k));
                        }
                for (size_t z = 0; z < dim; ++z)
                    diag(z) = m.b_field * (2.0 * popcount(z) - n);
                break;
        }
        double dmax = diag.size() ? diag.cwiseAbs().maxCoeff() : 0.0;
        norm_bound = dmax + pair_sum;
    }

    void apply(const VectorXcd& in, VectorXcd& out) const {
        out = diag.cast<Cplx>().cwiseProduct(in);
        for (const auto& p : pairs) {
            for (size_t z = 0; z < dim; ++z) {
                if (exchange_only) {
                    std::uint64_t bits = z & p.mask;
                    if (bits == 0 || bits == p.mask) continue;  // aligned pair
                }
                out(z ^ p.mask) += p.j * in(z);
            }
        }
    }
};

void check_pure_size(int n) {
    if (n < 1 || n > kMaxPureSites)
        throw std::invalid_argument("state-vector engine limited to 1..14 sites");
}

void check_density_size(int n) {
    if (n < 1 || n > kMaxDensitySites)
        throw std::invalid_argument("density-matrix engine limited to 1..8 sites");
}

}  // namespace

void PureState::validate() const {
    check_pure_size(n);
    if (amps.size() != (Eigen::Index{1} << n))
        throw std::invalid_argument("PureState: bad amplitude size");
    if (std::abs(amps.squaredNorm() - 1.0) > 1e-10)
        throw std::invalid_argument("PureState: not normalized");
}

void DensityState::validate() const {
    check_density_size(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    if (rho.rows() != dim || rho.cols() != dim)
        throw std::invalid_argument("DensityState: bad size");
    if (std::abs(rho.trace().real() - 1.0) > 1e-9)
        throw std::invalid_argument("DensityState: trace != 1");
}

PureState css_pure(int n) {
    check_pure_size(n);
    PureState s;
    s.n = n;
    s.amps = VectorXcd::Constant(Eigen::Index{1} << n, std::pow(2.0, -0.5 * n));
    return s;
}

DensityState css_density(int n) {
    check_density_size(n);
    PureState p = css_pure(n);
    DensityState r;
    r.n = n;
    r.rho = p.amps * p.amps.adjoint();
    return r;
}

PureState ghz_target(int n, double phase) {
    if (n < 2) throw std::invalid_argument("ghz_target: n must be >= 2");
    check_pure_size(n);
    PureState s;
    s.n = n;
    s.amps = VectorXcd::Zero(Eigen::Index{1} << n);
    const double r = 1.0 / std::sqrt(2.0);
    s.amps((Eigen::Index{1} << n) - 1) = r;                     // all up
    s.amps(0) = r * std::exp(Cplx(0, phase));                   // all down
    return s;
}

void apply_hamiltonian(const ModelSpec& m, const VectorXcd& in, VectorXcd& out) {
    HamOp op(m);
    if (in.size() != static_cast<Eigen::Index>(op.dim))
        throw std::invalid_argument("apply_hamiltonian: state size mismatch");
    out.resize(in.size());
    op.apply(in, out);
}

PureState evolve_unitary(const PureState& s, const ModelSpec& m, double t) {
    s.validate();
    if (m.gamma_z != 0.0)
        throw std::invalid_argument("evolve_unitary requires gamma_z == 0");
    if (m.sites() != s.n) throw std::invalid_argument("evolve_unitary: site count mismatch");
    HamOp op(m);
    PureState out = s;
    if (op.pairs.empty()) {  // diagonal Hamiltonian: exact phases
        for (size_t z = 0; z < op.dim; ++z)
            out.amps(z) *= std::exp(Cplx(0, -op.diag(z) * t));
        return out;
    }
    auto apply = [&op](const VectorXcd& in, VectorXcd& w) {
        op.apply(in, w);
        w *= Cplx(0, -1);
    };
    out.amps = detail::krylov_expv(apply, s.amps, t, op.norm_bound);
    return out;
}

PureState rotating_frame(const PureState& s, double b, double t) {
    PureState out = s;
    for (Eigen::Index z = 0; z < s.amps.size(); ++z)
        out.amps(z) *= std::exp(Cplx(0, b * t * (2.0 * popcount(z) - s.n)));
    return out;
}

PureState rotate_pure(const PureState& s, double theta, double phi) {
    PureState out = s;
    const Cplx uu = std::cos(0.5 * theta);
    const Cplx ud = Cplx(0, -std::sin(0.5 * theta)) * std::exp(Cplx(0, -phi));
    const Cplx du = Cplx(0, -std::sin(0.5 * theta)) * std::exp(Cplx(0, phi));
    for (int i = 0; i < s.n; ++i) {
        const std::uint64_t bit = std::uint64_t{1} << i;
        for (std::uint64_t z = 0; z < out.amps.size(); ++z) {
            if (z & bit) continue;  // visit each (down, up) pair once
            Cplx lo = out.amps(z), hi = out.amps(z | bit);
            out.amps(z | bit) = uu * hi + ud * lo;
            out.amps(z) = du * hi + uu * lo;
        }
    }
    return out;
}

DensityState evolve_lindblad(const DensityState& r, const ModelSpec& m, double t) {
    r.validate();
    if (m.sites() != r.n) throw std::invalid_argument("evolve_lindblad: site count mismatch");
    HamOp op(m);
    const Eigen::Index dim = Eigen::Index{1} << r.n;
    VectorXd sz(dim);
    for (Eigen::Index z = 0; z < dim; ++z) sz(z) = popcount(z) - 0.5 * r.n;
    const double gamma = m.gamma_z;

    // Lindbladian on the vectorized density matrix. H is real symmetric in
    // the computational basis, so rho H = (H rho^T)^T.
    auto apply = [&](const VectorXcd& vin, VectorXcd& vout) {
        Eigen::Map<const MatrixXcd> rho(vin.data(), dim, dim);
        MatrixXcd hrho(dim, dim), rhoh(dim, dim);
        VectorXcd col(dim), res(dim);
        for (Eigen::Index c = 0; c < dim; ++c) {
            op.apply(rho.col(c), res);
            hrho.col(c) = res;
        }
        MatrixXcd rt = rho.transpose();
        for (Eigen::Index c = 0; c < dim; ++c) {
            op.apply(rt.col(c), res);
            rhoh.col(c) = res;
        }
        MatrixXcd out = Cplx(0, -1) * (hrho - rhoh.transpose());
        if (gamma > 0.0) {
            out.noalias() += gamma * (sz.cast<Cplx>().asDiagonal() * rho *
                                      sz.cast<Cplx>().asDiagonal());
            Eigen::ArrayXd sz2 = sz.array().square();
            for (Eigen::Index a = 0; a < dim; ++a)
                for (Eigen::Index b = 0; b < dim; ++b)
                    out(a, b) -= 0.5 * gamma * (sz2(a) + sz2(b)) * rho(a, b);
        }
        vout.resize(dim * dim);
        Eigen::Map<MatrixXcd>(vout.data(), dim, dim) = out;
    };

    double sz2max = std::max(sz(0) * sz(0), sz(dim - 1) * sz(dim - 1));
    double anorm = 2.0 * op.norm_bound + 2.0 * gamma * sz2max;

    VectorXcd v(dim * dim);
    Eigen::Map<MatrixXcd>(v.data(), dim, dim) = r.rho;
    v = detail::krylov_expv(apply, v, t, anorm);

    DensityState out;
    out.n = r.n;
    out.rho = Eigen::Map<MatrixXcd>(v.data(), dim, dim);
    out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
    return out;
}

namespace {

// sigma_i^a |psi>
void apply_pauli(int site, int axis, const VectorXcd& in, VectorXcd& out) {
    const std::uint64_t bit = std::uint64_t{1} << site;
    out.resize(in.size());
    switch (axis) {
        case AX:
            for (std::uint64_t z = 0; z < static_cast<std::uint64_t>(in.size()); ++z)
                out(z) = in(z ^ bit);
            break;
        case AY:
            for (std::uint64_t z = 0; z < static_cast<std::uint64_t>(in.size()); ++z)
                out(z) = (z & bit) ? Cplx(0, -1) * in(z ^ bit) : Cplx(0, 1) * in(z ^ bit);
            break;
        case AZ:
            for (std::uint64_t z = 0; z < static_cast<std::uint64_t>(in.size()); ++z)
                out(z) = (z & bit) ? in(z) : -in(z);
            break;
    }
}

}  // namespace

MomentTable measure_moments(const PureState& s) {
    const int n = s.n;
    MomentTable t(n);
    t.set_same_site_pauli();
    std::vector<VectorXcd> v(static_cast<size_t>(n) * 3);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a) apply_pauli(i, a, s.amps, v[i * 3 + a]);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a) {
            t.first(i, a) = s.amps.dot(v[i * 3 + a]).real();
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                for (int b = 0; b < 3; ++b)
                    t.second(i, a, j, b) = v[i * 3 + a].dot(v[j * 3 + b]).real();
            }
        }
    return t;
}

MomentTable measure_moments(const DensityState& r) {
    const int n = r.n;
    const Eigen::Index dim = Eigen::Index{1} << n;
    MomentTable t(n);
    t.set_same_site_pauli();
    // B[j][b] = sigma_j^b rho (column-wise application)
    std::vector<MatrixXcd> bmat(static_cast<size_t>(n) * 3, MatrixXcd(dim, dim));
    VectorXcd col(dim);
    for (int j = 0; j < n; ++j)
        for (int b = 0; b < 3; ++b)
            for (Eigen::Index c = 0; c < dim; ++c) {
                apply_pauli(j, b, r.rho.col(c), col);
                bmat[j * 3 + b].col(c) = col;
            }
    auto trace_pauli = [&](int site, int axis, const MatrixXcd& mat) {
        const std::uint64_t bit = std::uint64_t{1} << site;
        Cplx tr = 0.0;
        for (std::uint64_t z = 0; z < static_cast<std::uint64_t>(dim); ++z) {
            switch (axis) {
                case AX: tr += mat(z ^ bit, z); break;
                case AY:
                    tr += ((z & bit) ? Cplx(0, -1) : Cplx(0, 1)) * mat(z ^ bit, z);
                    break;
                case AZ: tr += ((z & bit) ? 1.0 : -1.0) * mat(z, z); break;
            }
        }
        return tr;
    };
    for (int j = 0; j < n; ++j)
        for (int b = 0; b < 3; ++b) {
            t.first(j, b) = bmat[j * 3 + b].trace().real();
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                for (int a = 0; a < 3; ++a)
                    t.second(i, a, j, b) = trace_pauli(i, a, bmat[j * 3 + b]).real();
            }
        }
    return t;
}

double energy(const ModelSpec& m, const PureState& s) {
    VectorXcd hs;
    apply_hamiltonian(m, s.amps, hs);
    return s.amps.dot(hs).real();
}

double fidelity(const PureState& a, const PureState& b) {
    if (a.n != b.n) throw std::invalid_argument("fidelity: size mismatch");
    return std::norm(a.amps.dot(b.amps));
}

Eigen::VectorXd magnetization_histogram(const PureState& s) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(s.n + 1);
    for (std::uint64_t z = 0; z < static_cast<std::uint64_t>(s.amps.size()); ++z)
        p(popcount(z)) += std::norm(s.amps(z));
    return p;
}

Eigen::VectorXd magnetization_histogram(const DensityState& r) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(r.n + 1);
    for (Eigen::Index z = 0; z < r.rho.rows(); ++z)
        p(popcount(z)) += r.rho(z, z).real();
    return p;
}

}  // namespace ed
}  // namespace spinsim
