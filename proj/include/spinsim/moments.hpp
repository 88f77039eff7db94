#ifndef SPINSIM_MOMENTS_HPP
#define SPINSIM_MOMENTS_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace spinsim {

enum Axis { AX = 0, AY = 1, AZ = 2 };

/// Site-resolved first moments <sigma_i^a> and symmetrized second moments
/// <(sigma_i^a sigma_j^b + sigma_j^b sigma_i^a)/2>. Same-site entries follow
/// Pauli algebra: the symmetrized <sigma_i^a sigma_i^b> is delta_ab.
struct MomentTable {
    int n = 0;
    Eigen::MatrixXd first;          // n x 3
    std::vector<double> second_;    // n*n*9, index (i,a,j,b)
    std::optional<Eigen::MatrixXd> first_stderr;  // n x 3 when available

    MomentTable() = default;
    explicit MomentTable(int n_sites);

    double& second(int i, int a, int j, int b) {
        return second_[((static_cast<size_t>(i) * 3 + a) * n + j) * 3 + b];
    }
    double second(int i, int a, int j, int b) const {
        return second_[((static_cast<size_t>(i) * 3 + a) * n + j) * 3 + b];
    }
    /// Fills same-site entries from Pauli algebra (delta_ab).
    void set_same_site_pauli();
};

/// Collective spin moments: <S_a> and symmetrized <S_a S_b>.
struct CollectiveMoments {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Matrix3d second = Eigen::Matrix3d::Zero();  // symmetric

    /// Covariance of the collective spin components.
    Eigen::Matrix3d covariance() const {
        return second - mean * mean.transpose();
    }
};

/// Reduces a site-resolved table to collective moments
/// (S_a = sum_i sigma_i^a / 2).
CollectiveMoments collective_from_table(const MomentTable& t);

/// Expands collective moments of a permutation-symmetric state into a
/// site-resolved table (all sites and all pairs equivalent).
MomentTable table_from_collective(const CollectiveMoments& m, int n);

/// Applies a global rotation r to every moment (first -> r*first,
/// second -> r * second * r^T, sitewise).
MomentTable rotate_table(const MomentTable& t, const Eigen::Matrix3d& r);
CollectiveMoments rotate_collective(const CollectiveMoments& m, const Eigen::Matrix3d& r);

}  // namespace spinsim

#endif
