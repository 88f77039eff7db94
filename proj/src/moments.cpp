#include "spinsim/moments.hpp"

#include <stdexcept>

namespace spinsim {

MomentTable::MomentTable(int n_sites)
    : n(n_sites),
      first(Eigen::MatrixXd::Zero(n_sites, 3)),
      second_(static_cast<size_t>(n_sites) * n_sites * 9, 0.0) {}

void MomentTable::set_same_site_pauli() {
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) second(i, a, i, b) = (a == b) ? 1.0 : 0.0;
}

CollectiveMoments collective_from_table(const MomentTable& t) {
    CollectiveMoments m;
    for (int a = 0; a < 3; ++a) m.mean(a) = 0.5 * t.first.col(a).sum();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double s = 0.0;
            for (int i = 0; i < t.n; ++i)
                for (int j = 0; j < t.n; ++j)
                    if (i != j) s += t.second(i, a, j, b);
            m.second(a, b) = 0.25 * (s + (a == b ? t.n : 0));
        }
    return m;
}

MomentTable table_from_collective(const CollectiveMoments& m, int n) {
    if (n < 1) throw std::invalid_argument("table_from_collective: n must be >= 1");
    MomentTable t(n);
    for (int a = 0; a < 3; ++a) t.first.col(a).setConstant(2.0 * m.mean(a) / n);
    t.set_same_site_pauli();
    if (n > 1) {
        const double denom = static_cast<double>(n) * (n - 1);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double pair = (4.0 * m.second(a, b) - (a == b ? n : 0)) / denom;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (i != j) t.second(i, a, j, b) = pair;
            }
    }
    return t;
}

CollectiveMoments rotate_collective(const CollectiveMoments& m, const Eigen::Matrix3d& r) {
    CollectiveMoments out;
    out.mean = r * m.mean;
    out.second = r * m.second * r.transpose();
    return out;
}

MomentTable rotate_table(const MomentTable& t, const Eigen::Matrix3d& r) {
    MomentTable out(t.n);
    out.first = t.first * r.transpose();
    if (t.first_stderr) out.first_stderr = *t.first_stderr;  // errors not rotated
    for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < t.n; ++j) {
            Eigen::Matrix3d block;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) block(a, b) = t.second(i, a, j, b);
            Eigen::Matrix3d rb = r * block * r.transpose();
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) out.second(i, a, j, b) = rb(a, b);
        }
    return out;
}

}  // namespace spinsim
