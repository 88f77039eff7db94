#include "spinsim/observables.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace spinsim {
namespace obs {

namespace {

using Cplx = std::complex<double>;

// Orthonormal pair spanning the plane perpendicular to unit vector u.
void transverse_basis(const Eigen::Vector3d& u, Eigen::Vector3d& e1,
                      Eigen::Vector3d& e2) {
    Eigen::Vector3d seed = std::abs(u.z()) < 0.9 ? Eigen::Vector3d::UnitZ()
                                                 : Eigen::Vector3d::UnitX();
    e1 = (seed - seed.dot(u) * u).normalized();
    e2 = u.cross(e1);
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

Squeezing squeezing_wineland(const CollectiveMoments& m, int n) {
    if (n < 2) throw std::invalid_argument("squeezing_wineland: n must be >= 2");
    const double s_len = m.mean.norm();
    if (s_len < 1e-12) throw std::invalid_argument("squeezing_wineland: Bloch vector vanishes");
    Eigen::Vector3d u = m.mean / s_len, e1, e2;
    transverse_basis(u, e1, e2);

    auto var = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
        return a.dot(m.second * b) - a.dot(m.mean) * b.dot(m.mean);
    };
    const double v11 = var(e1, e1), v22 = var(e2, e2);
    const double v12 = 0.5 * (var(e1, e2) + var(e2, e1));
    const double half_tr = 0.5 * (v11 + v22);
    const double rad = std::sqrt(0.25 * (v11 - v22) * (v11 - v22) + v12 * v12);
    const double lam_min = half_tr - rad;

    Squeezing out;
    out.xi2 = n * lam_min / (s_len * s_len);
    out.db = 10.0 * std::log10(out.xi2);
    // eigenvector of the 2x2 covariance for the smaller eigenvalue
    double psi = 0.5 * std::atan2(2.0 * v12, v11 - v22) + std::numbers::pi / 2.0;
    out.axis = std::cos(psi) * e1 + std::sin(psi) * e2;
    // guard the degenerate case where atan2 picks the major axis
    if (var(out.axis, out.axis) > half_tr + 1e-12 * std::abs(half_tr)) {
        psi -= std::numbers::pi / 2.0;
        out.axis = std::cos(psi) * e1 + std::sin(psi) * e2;
    }
    return out;
}

Squeezing squeezing_wineland(const MomentTable& t) {
    return squeezing_wineland(collective_from_table(t), t.n);
}

TotalSpin total_spin(const CollectiveMoments& m, int n) {
    TotalSpin out;
    out.s2 = m.second.trace();
    const double s = 0.5 * n;
    out.normalized = out.s2 / (s * (s + 1.0));
    return out;
}

TotalSpin total_spin(const MomentTable& t) {
    return total_spin(collective_from_table(t), t.n);
}

KGrid KGrid::lattice(int n) {
    if (n < 1) throw std::invalid_argument("KGrid::lattice: n must be >= 1");
    KGrid g;
    const int lo = -(n - 1) / 2;  // integer m in (-n/2, n/2]
    for (int m = lo; m <= n / 2; ++m)
        g.k.push_back(2.0 * std::numbers::pi * m / n);
    return g;
}

SpinWaves spin_wave_occupations(const MomentTable& t,
                                const std::vector<double>& positions,
                                const KGrid& g) {
    const int n = t.n;
    if (static_cast<int>(positions.size()) != n)
        throw std::invalid_argument("spin_wave_occupations: positions size mismatch");
    SpinWaves out;
    double sx_sum = 0.0;
    for (int i = 0; i < n; ++i) sx_sum += t.first(i, AX);
    for (double k : g.k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                acc += (t.second(i, AY, j, AY) + t.second(i, AZ, j, AZ)) *
                       std::cos(k * (positions[i] - positions[j]));
        double ck = 0.5 - sx_sum / (2.0 * n) + acc / (2.0 * n);
        out.occupation.push_back(ck);
        if (std::abs(k) < 1e-12)
            out.k0 = ck;
        else
            out.sum_k_nonzero += ck;
    }
    return out;
}

QGrid QGrid::uniform(int n_theta, int n_phi) {
    if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("QGrid: grid too small");
    QGrid g;
    for (int i = 0; i < n_theta; ++i)
        g.theta.push_back(std::numbers::pi * i / (n_theta - 1));
    for (int j = 0; j < n_phi; ++j)
        g.phi.push_back(2.0 * std::numbers::pi * j / n_phi);
    g.q = Eigen::MatrixXd::Zero(n_theta, n_phi);
    return g;
}

double QGrid::normalization(int n) const {
    const double dphi = 2.0 * std::numbers::pi / phi.size();
    double integral = 0.0;
    for (size_t i = 0; i < theta.size(); ++i) {
        double w = (i == 0 || i + 1 == theta.size()) ? 0.5 : 1.0;
        w *= theta[1] - theta[0];
        integral += w * std::sin(theta[i]) * q.row(i).sum() * dphi;
    }
    return (n + 1) * integral / (4.0 * std::numbers::pi);
}

namespace {

// Coherent-state sector weights: amplitude on a k-up sector carries
// cos(theta/2)^k sin(theta/2)^(n-k) e^{i phi (n-k)} times the basis content.
void husimi_from_sectors(const Eigen::VectorXcd& sector, int n, bool with_sqrt_binom,
                         QGrid& g) {
    const int nt = static_cast<int>(g.theta.size());
    const int np = static_cast<int>(g.phi.size());
    for (int i = 0; i < nt; ++i) {
        const double c = std::cos(0.5 * g.theta[i]);
        const double s = std::sin(0.5 * g.theta[i]);
        Eigen::VectorXd mag(n + 1);
        for (int k = 0; k <= n; ++k) {
            double lm = k * std::log(std::max(c, 1e-300)) +
                        (n - k) * std::log(std::max(s, 1e-300));
            if (with_sqrt_binom) lm += 0.5 * log_binomial(n, k);
            mag(k) = ((c == 0.0 && k > 0) || (s == 0.0 && k < n)) ? 0.0 : std::exp(lm);
        }
        for (int j = 0; j < np; ++j) {
            Cplx ov = 0.0;
            for (int k = 0; k <= n; ++k)
                ov += mag(k) * std::exp(Cplx(0, -g.phi[j] * (n - k))) * sector(k);
            g.q(i, j) = std::norm(ov);
        }
    }
}

}  // namespace

void husimi_q(const DickeState& s, QGrid& g) {
    if (s.pure) {
        // Dicke amplitudes already carry sqrt(C(n,a))
        husimi_from_sectors(s.amps, s.n, true, g);
        return;
    }
    const int n = s.n;
    Eigen::VectorXd lb(n + 1);
    for (int k = 0; k <= n; ++k) lb(k) = 0.5 * log_binomial(n, k);
    for (size_t i = 0; i < g.theta.size(); ++i) {
        const double c = std::cos(0.5 * g.theta[i]);
        const double s2 = std::sin(0.5 * g.theta[i]);
        Eigen::VectorXcd v(n + 1);
        for (int k = 0; k <= n; ++k) {
            double lm = lb(k) + k * std::log(std::max(c, 1e-300)) +
                        (n - k) * std::log(std::max(s2, 1e-300));
            // phase factor applied per phi below
            v(k) = ((c == 0.0 && k > 0) || (s2 == 0.0 && k < n)) ? 0.0 : std::exp(lm);
        }
        for (size_t j = 0; j < g.phi.size(); ++j) {
            Eigen::VectorXcd w(n + 1);
            for (int k = 0; k <= n; ++k)
                w(k) = v(k) * std::exp(Cplx(0, g.phi[j] * (n - k)));
            g.q(i, j) = std::real(w.dot(s.rho * w));
        }
    }
}

void husimi_q(const ed::PureState& s, QGrid& g) {
    // reduce the 2^n vector to magnetization sectors once
    Eigen::VectorXcd sector = Eigen::VectorXcd::Zero(s.n + 1);
    for (Eigen::Index z = 0; z < s.amps.size(); ++z)
        sector(std::popcount(static_cast<std::uint64_t>(z))) += s.amps(z);
    husimi_from_sectors(sector, s.n, false, g);
}

void husimi_q(const ed::DensityState& r, QGrid& g) {
    const int n = r.n;
    Eigen::MatrixXcd sec = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    for (Eigen::Index a = 0; a < r.rho.rows(); ++a)
        for (Eigen::Index b = 0; b < r.rho.cols(); ++b)
            sec(std::popcount(static_cast<std::uint64_t>(a)),
                std::popcount(static_cast<std::uint64_t>(b))) += r.rho(a, b);
    for (size_t i = 0; i < g.theta.size(); ++i) {
        const double c = std::cos(0.5 * g.theta[i]);
        const double s = std::sin(0.5 * g.theta[i]);
        Eigen::VectorXd mag(n + 1);
        for (int k = 0; k <= n; ++k) {
            double lm = k * std::log(std::max(c, 1e-300)) +
                        (n - k) * std::log(std::max(s, 1e-300));
            mag(k) = ((c == 0.0 && k > 0) || (s == 0.0 && k < n)) ? 0.0 : std::exp(lm);
        }
        for (size_t j = 0; j < g.phi.size(); ++j) {
            Eigen::VectorXcd w(n + 1);
            for (int k = 0; k <= n; ++k)
                w(k) = mag(k) * std::exp(Cplx(0, g.phi[j] * (n - k)));
            g.q(i, j) = std::real(w.dot(sec * w));
        }
    }
}

int equator_peak_count(const QGrid& g, double rel_threshold) {
    // row whose polar angle is closest to the equator
    size_t row = 0;
    double best = 1e300;
    for (size_t i = 0; i < g.theta.size(); ++i) {
        double d = std::abs(g.theta[i] - std::numbers::pi / 2.0);
        if (d < best) {
            best = d;
            row = i;
        }
    }
    const Eigen::VectorXd q = g.q.row(row).transpose();
    const int np = static_cast<int>(q.size());
    const double thr = rel_threshold * q.maxCoeff();
    if (q.maxCoeff() <= 0.0) return 0;

    int peaks = 0;
    for (int j = 0; j < np; ++j) {
        if (q(j) < thr) continue;
        // walk over a plateau of equal values starting here; count it once,
        // attributed to its first index, if both ends drop strictly.
        int prev = (j + np - 1) % np;
        if (q(prev) == q(j)) continue;  // plateau counted at its first index
        if (q(prev) > q(j)) continue;
        int end = j;
        while (q((end + 1) % np) == q(j)) {
            end = (end + 1) % np;
            if (end == j) return 1;  // constant ring
        }
        if (q((end + 1) % np) < q(j)) ++peaks;
    }
    return peaks;
}

namespace {

double fit_contrast(const std::vector<double>& phases, const std::vector<double>& parity,
                    int n) {
    const Eigen::Index rows = static_cast<Eigen::Index>(phases.size());
    Eigen::MatrixXd a(rows, 3);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        a(r, 0) = std::cos(n * phases[r]);
        a(r, 1) = std::sin(n * phases[r]);
        a(r, 2) = 1.0;
        y(r) = parity[r];
    }
    Eigen::Vector3d coef = a.colPivHouseholderQr().solve(y);
    return std::hypot(coef(0), coef(1));
}

}  // namespace

ParityScan parity_scan(const DickeState& s, const std::vector<double>& phases) {
    if (phases.size() < 3) throw std::invalid_argument("parity_scan: need >= 3 phases");
    ParityScan out;
    for (double phi : phases) {
        DickeState r = rotate_dicke(s, std::numbers::pi / 2.0, phi);
        Eigen::VectorXd p = dicke_magnetization_histogram(r);
        double par = 0.0;
        for (int a = 0; a <= s.n; ++a) par += ((s.n - a) % 2 ? -1.0 : 1.0) * p(a);
        out.parity.push_back(par);
    }
    out.contrast = fit_contrast(phases, out.parity, s.n);
    return out;
}

ParityScan parity_scan(const ed::PureState& s, const std::vector<double>& phases) {
    if (phases.size() < 3) throw std::invalid_argument("parity_scan: need >= 3 phases");
    ParityScan out;
    for (double phi : phases) {
        ed::PureState r = ed::rotate_pure(s, std::numbers::pi / 2.0, phi);
        double par = 0.0;
        for (Eigen::Index z = 0; z < r.amps.size(); ++z) {
            int downs = s.n - std::popcount(static_cast<std::uint64_t>(z));
            par += (downs % 2 ? -1.0 : 1.0) * std::norm(r.amps(z));
        }
        out.parity.push_back(par);
    }
    out.contrast = fit_contrast(phases, out.parity, s.n);
    return out;
}

GhzFidelity ghz_fidelity(double p_top, double p_bottom, double contrast) {
    GhzFidelity out;
    out.f = 0.5 * (p_top + p_bottom + contrast);
    out.witness = out.f > 0.5;
    return out;
}

namespace {

// (|a| + |b|)^2 / 2 is the fidelity to (|top> + e^{i phi}|bottom>)/sqrt(2)
// maximized over phi.
double pole_fidelity(const Cplx& top, const Cplx& bottom) {
    double s = std::abs(top) + std::abs(bottom);
    return 0.5 * s * s;
}

double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  int iters = 60) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < iters; ++it) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = f(d);
        }
    }
    return std::max(fc, fd);
}

double maximize_over_azimuth(const std::function<double(double)>& f) {
    const double two_pi = 2.0 * std::numbers::pi;
    const int coarse = 128;
    int best = 0;
    double best_f = -1.0;
    for (int k = 0; k < coarse; ++k) {
        double v = f(two_pi * k / coarse);
        if (v > best_f) {
            best_f = v;
            best = k;
        }
    }
    double lo = two_pi * (best - 1) / coarse;
    double hi = two_pi * (best + 1) / coarse;
    return golden_max(f, lo, hi);
}

}  // namespace

double ghz_fidelity_aligned(const ed::PureState& s) {
    auto f = [&](double phi1) {
        ed::PureState r = ed::rotate_pure(s, std::numbers::pi / 2.0, phi1);
        const Eigen::Index top = (Eigen::Index{1} << s.n) - 1;
        return pole_fidelity(r.amps(top), r.amps(0));
    };
    return maximize_over_azimuth(f);
}

double ghz_fidelity_aligned(const DickeState& s) {
    auto f = [&](double phi1) {
        DickeState r = rotate_dicke(s, std::numbers::pi / 2.0, phi1);
        if (r.pure) return pole_fidelity(r.amps(s.n), r.amps(0));
        // <GHZ|rho|GHZ> maximized over the superposition phase
        double tt = r.rho(s.n, s.n).real(), bb = r.rho(0, 0).real();
        return 0.5 * (tt + bb) + std::abs(r.rho(s.n, 0));
    };
    return maximize_over_azimuth(f);
}

RamseyMse ramsey_mse(const CollectiveMoments& m, const std::vector<double>& phis) {
    if (phis.size() < 3) throw std::invalid_argument("ramsey_mse: need >= 3 phases");
    const double s_len = m.mean.norm();
    if (s_len < 1e-12) throw std::invalid_argument("ramsey_mse: Bloch vector vanishes");

    RamseyMse out;
    const Eigen::Index rows = static_cast<Eigen::Index>(phis.size());
    Eigen::MatrixXd a(rows, 3);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double phi = phis[r];
        const double cy = std::cos(phi), sy = std::sin(phi);
        double sy_mean = cy * m.mean(AY) + sy * m.mean(AX);
        double sy2 = cy * cy * m.second(AY, AY) + sy * sy * m.second(AX, AX) +
                     2.0 * sy * cy * 0.5 * (m.second(AX, AY) + m.second(AY, AX));
        double mse = phi * phi - 2.0 * phi * sy_mean / s_len + sy2 / (s_len * s_len);
        out.mse.push_back(mse);
        a(r, 0) = phi * std::sin(phi);
        a(r, 1) = std::sin(phi) * std::sin(phi);
        a(r, 2) = std::cos(phi) * std::cos(phi);
        y(r) = mse - phi * phi;
    }
    Eigen::Vector3d coef = a.colPivHouseholderQr().solve(y);
    out.a1 = coef(0);
    out.a2 = coef(1);
    out.a3 = coef(2);
    out.db_phi0 = 10.0 * std::log10(out.a3);
    return out;
}

CollectiveMoments align_for_ramsey(const CollectiveMoments& m) {
    const double s_len = m.mean.norm();
    if (s_len < 1e-12) throw std::invalid_argument("align_for_ramsey: Bloch vector vanishes");
    Eigen::Vector3d xhat = m.mean / s_len;
    Eigen::Vector3d yhat = squeezing_wineland(m, 2).axis;  // n only scales xi2
    yhat = (yhat - yhat.dot(xhat) * xhat).normalized();
    Eigen::Matrix3d r;
    r.row(0) = xhat.transpose();
    r.row(1) = yhat.transpose();
    r.row(2) = xhat.cross(yhat).transpose();
    return rotate_collective(m, r);
}

double jackknife_error(std::span<const double> samples,
                       const std::function<double(std::span<const double>)>& statistic) {
    const size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("jackknife_error: need >= 2 samples");
    std::vector<double> loo(samples.size() - 1);
    std::vector<double> theta(n);
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) {
        size_t w = 0;
        for (size_t k = 0; k < n; ++k)
            if (k != i) loo[w++] = samples[k];
        theta[i] = statistic(std::span<const double>(loo));
        mean += theta[i];
    }
    mean /= n;
    double ss = 0.0;
    for (double t : theta) ss += (t - mean) * (t - mean);
    return std::sqrt((n - 1.0) / n * ss);
}

}  // namespace obs
}  // namespace spinsim
