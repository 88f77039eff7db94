#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "spinsim/collective.hpp"
#include "spinsim/ed.hpp"
#include "spinsim/moments.hpp"

using namespace spinsim;

namespace {

ModelSpec oat_model(int n, double chi) {
    ModelSpec m;
    m.kind = ModelKind::OAT;
    m.n_oat = n;
    m.chi = chi;
    return m;
}

void check_close(const CollectiveMoments& a, const CollectiveMoments& b,
                 double tol) {
    CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() < tol);
    CHECK((a.second - b.second).cwiseAbs().maxCoeff() < tol);
}

}  // namespace

TEST_CASE("CSS Dicke state: moments of the +x polarized state") {
    const int n = 10;
    auto s = css_dicke(n);
    CHECK(s.pure);
    CHECK(std::abs(s.amps.norm() - 1.0) < 1e-14);
    auto m = dicke_moments(s);
    CHECK(std::abs(m.mean(AX) - n / 2.0) < 1e-12);
    CHECK(std::abs(m.mean(AY)) < 1e-12);
    CHECK(std::abs(m.mean(AZ)) < 1e-12);
    // transverse variances n/4, <Sx^2> = n^2/4
    CHECK(std::abs(m.second(AY, AY) - n / 4.0) < 1e-12);
    CHECK(std::abs(m.second(AZ, AZ) - n / 4.0) < 1e-12);
    CHECK(std::abs(m.second(AX, AX) - n * n / 4.0) < 1e-11);
    // total spin S(S+1)
    double s2 = m.second(AX, AX) + m.second(AY, AY) + m.second(AZ, AZ);
    CHECK(std::abs(s2 - 0.5 * n * (0.5 * n + 1)) < 1e-11);
}

TEST_CASE("OAT phase evolution agrees with full exact diagonalization") {
    // Dual-engine identity: the (n+1)-dimensional Dicke evolution and the
    // 2^n-dimensional state-vector evolution describe the same dynamics.
    const int n = 8;
    const double chi = 700.0, t = 1.3e-3;
    auto dicke = dicke_moments(evolve_oat(css_dicke(n), chi, t));

    auto m = oat_model(n, chi);
    auto psi = ed::evolve_unitary(ed::css_pure(n), m, t);
    auto full = collective_from_table(ed::measure_moments(psi));
    check_close(dicke, full, 1e-9);
}

TEST_CASE("collective dephasing of the density matrix matches the analytic decay") {
    // <S_{x,y}> pick up e^{-Gz t/2}; Sx^2-Sy^2 and {Sx,Sy} pick up e^{-2 Gz t};
    // everything commuting with Sz is untouched.
    const int n = 9;
    const double chi = 400.0, t = 1.1e-3, gz = 29.4;
    auto evolved = evolve_oat(css_dicke(n), chi, t);
    auto unitary = dicke_moments(evolved);
    auto dephased = dicke_moments(dephase_dicke(evolved, gz, t));
    auto predicted = decay_replacements(unitary, ModelKind::OAT, gz, t);
    check_close(dephased, predicted, 1e-10);
}

TEST_CASE("decay replacements preserve the total spin") {
    const int n = 7;
    auto m = dicke_moments(evolve_oat(css_dicke(n), 500.0, 0.8e-3));
    auto d = decay_replacements(m, ModelKind::PLXX, 30.0, 2e-3);
    CHECK(std::abs(d.second.trace() - m.second.trace()) < 1e-12);
    CHECK(std::abs(m.second.trace() - 0.5 * n * (0.5 * n + 1)) < 1e-11);
}

TEST_CASE("decay replacements refuse the transverse-field model") {
    auto m = dicke_moments(css_dicke(4));
    CHECK_THROWS_AS(decay_replacements(m, ModelKind::PLTFI, 10.0, 1e-3),
                    std::invalid_argument);
}

TEST_CASE("collective rotations move the Bloch vector as SO(3)") {
    const int n = 6;
    auto s = css_dicke(n);  // along +x
    // R(pi/2, phi=pi/2) = exp(-i pi/2 Sy): x -> -z
    auto r = dicke_moments(rotate_dicke(s, M_PI / 2, M_PI / 2));
    CHECK(std::abs(r.mean(AZ) + n / 2.0) < 1e-12);
    CHECK(std::abs(r.mean(AX)) < 1e-12);
    // full turn is the identity on moments
    auto full = dicke_moments(rotate_dicke(s, 2 * M_PI, 0.3));
    check_close(full, dicke_moments(s), 1e-10);
}

TEST_CASE("rotation agrees between Dicke and full-space representations") {
    const int n = 5;
    const double theta = 0.7, phi = 1.9;
    auto a = dicke_moments(rotate_dicke(css_dicke(n), theta, phi));
    auto b = collective_from_table(
        ed::measure_moments(ed::rotate_pure(ed::css_pure(n), theta, phi)));
    check_close(a, b, 1e-12);
}

TEST_CASE("closed-form Ising correlators match exact diagonalization") {
    const int n = 7;
    const double t = 0.9e-3;
    auto c = power_law_couplings(n, 560.0, 1.0);
    auto closed = ising_correlators(c, t);

    ModelSpec m;
    m.kind = ModelKind::PLIsing;
    m.couplings = c;
    auto psi = ed::evolve_unitary(ed::css_pure(n), m, t);
    auto exact = ed::measure_moments(psi);

    REQUIRE(closed.n == n);
    double max_diff = 0.0;
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a) {
            max_diff = std::max(max_diff,
                                std::abs(closed.first(i, a) - exact.first(i, a)));
            for (int j = 0; j < n; ++j)
                for (int b = 0; b < 3; ++b)
                    max_diff = std::max(max_diff,
                                        std::abs(closed.second(i, a, j, b) -
                                                 exact.second(i, a, j, b)));
        }
    CHECK(max_diff < 1e-9);
}

TEST_CASE("magnetization histogram of Dicke states") {
    const int n = 8;
    auto h0 = dicke_magnetization_histogram(css_dicke(n));
    REQUIRE(h0.size() == n + 1);
    CHECK(std::abs(h0.sum() - 1.0) < 1e-13);
    // CSS along x: binomial distribution over sectors
    for (int a = 0; a <= n; ++a) {
        double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(a + 1.0) -
                                std::lgamma(n - a + 1.0)) /
                       std::pow(2.0, n);
        CHECK(h0[a] == doctest::Approx(binom).epsilon(1e-10));
    }
    // dephasing acts only on coherences, not on sector populations
    auto hd = dicke_magnetization_histogram(
        dephase_dicke(evolve_oat(css_dicke(n), 300.0, 1e-3), 25.0, 1e-3));
    CHECK(std::abs(hd.sum() - 1.0) < 1e-12);
}

TEST_CASE("site table round trip for permutation-symmetric states") {
    const int n = 6;
    auto m = dicke_moments(evolve_oat(css_dicke(n), 450.0, 0.7e-3));
    auto table = table_from_collective(m, n);
    auto back = collective_from_table(table);
    check_close(back, m, 1e-11);
    // same-site convention: delta_ab
    CHECK(table.second(2, AX, 2, AX) == 1.0);
    CHECK(table.second(2, AX, 2, AY) == 0.0);
}

TEST_CASE("moment rotation helpers transform first and second moments") {
    Eigen::Matrix3d r;
    r = Eigen::AngleAxisd(0.4, Eigen::Vector3d::UnitZ());
    auto m = dicke_moments(evolve_oat(css_dicke(5), 380.0, 1e-3));
    auto rm = rotate_collective(m, r);
    CHECK((rm.mean - r * m.mean).norm() < 1e-13);
    CHECK((rm.second - r * m.second * r.transpose()).norm() < 1e-13);
}
