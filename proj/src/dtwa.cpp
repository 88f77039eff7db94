#include "spinsim/dtwa.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace spinsim {
namespace dtwa {

namespace {

constexpr int kBlockSize = 50;  // trajectories per reduction block

struct Segment {
    int substeps;
    double h;
};

// Fixed integration grid between consecutive sample times, identical for
// every trajectory and worker count.
std::vector<Segment> build_grid(const Schedule& sched, double dt_max) {
    std::vector<Segment> segs;
    double prev = 0.0;
    for (double t : sched.sample_times) {
        double span = t - prev;
        if (span > 0.0) {
            int ns = std::max(1, static_cast<int>(std::ceil(span / dt_max - 1e-12)));
            segs.push_back({ns, span / ns});
        } else {
            segs.push_back({0, 0.0});
        }
        prev = t;
    }
    return segs;
}

// Per-block accumulation; folded into global sums in block-index order.
struct BlockSums {
    // per sample time: first moments (n*3), their squares (n*3),
    // pair products for i<j and all 9 axis combos, collective moments (12)
    std::vector<std::vector<double>> first, firstsq, pairs;
    std::vector<CollectiveMoments> collective;
    int count = 0;
};

}  // namespace

TrajectoryEnsemble sample_discrete_wigner(int n, int m_traj, const RngPlan& plan) {
    if (n < 1 || m_traj < 1)
        throw std::invalid_argument("sample_discrete_wigner: n and m_traj must be >= 1");
    TrajectoryEnsemble e;
    e.n = n;
    e.m_traj = m_traj;
    e.spins.resize(static_cast<size_t>(m_traj) * n * 3);
    for (int t = 0; t < m_traj; ++t) {
        RngStream rng(plan, static_cast<std::uint64_t>(t));
        for (int i = 0; i < n; ++i) {
            std::uint64_t u = rng.next_u64();
            e.at(t, i, AX) = 1.0;
            e.at(t, i, AY) = (u & 1) ? 1.0 : -1.0;
            e.at(t, i, AZ) = (u & 2) ? 1.0 : -1.0;
        }
    }
    return e;
}

void drift(const ModelSpec& model, const double* s, double* f) {
    const int n = model.couplings.n;
    const Eigen::MatrixXd& j = model.couplings.j;
    switch (model.kind) {
        case ModelKind::PLXX:
            for (int i = 0; i < n; ++i) {
                double hx = 0.0, hy = 0.0;
                for (int k = 0; k < n; ++k) {
                    hx += j(i, k) * s[3 * k + AX];
                    hy += j(i, k) * s[3 * k + AY];
                }
                f[3 * i + AX] = s[3 * i + AZ] * hy;
                f[3 * i + AY] = -s[3 * i + AZ] * hx;
                f[3 * i + AZ] = s[3 * i + AY] * hx - s[3 * i + AX] * hy;
            }
            break;
        case ModelKind::PLTFI: {
            const double b2 = 2.0 * model.b_field;
            for (int i = 0; i < n; ++i) {
                double hx = 0.0;
                for (int k = 0; k < n; ++k) hx += j(i, k) * s[3 * k + AX];
                f[3 * i + AX] = -b2 * s[3 * i + AY];
                f[3 * i + AY] = b2 * s[3 * i + AX] - 2.0 * hx * s[3 * i + AZ];
                f[3 * i + AZ] = 2.0 * hx * s[3 * i + AY];
            }
            break;
        }
        default:
            throw std::invalid_argument("dtwa::drift supports only PL-XX and PL-TFI");
    }
}

double rate_scale(const ModelSpec& model) {
    double row_max = 0.0;
    for (int i = 0; i < model.couplings.n; ++i)
        row_max = std::max(row_max, model.couplings.j.row(i).cwiseAbs().sum());
    return std::max({std::abs(model.b_field), row_max, model.gamma_z});
}

double max_step(const ModelSpec& model) {
    double scale = rate_scale(model);
    if (scale <= 0.0) throw std::invalid_argument("dtwa: model has no dynamics");
    // A quarter of the classic 0.02/rate stability heuristic: keeps single-step
    // rotation angles small enough that per-spin norm^2 stays within 1e-4
    // of 3 over millisecond-scale runs.
    return 0.005 / scale;
}

void heun_step(const ModelSpec& model, double* s, double dt, double dw,
               std::vector<double>& scratch) {
    const int n = model.couplings.n;
    if (dt <= 0.0) throw std::invalid_argument("heun_step: dt must be > 0");
    if (dt > max_step(model) * (1 + 1e-9))
        throw std::invalid_argument("heun_step: dt violates the stability bound");
    scratch.resize(static_cast<size_t>(9) * n);
    double* f1 = scratch.data();
    double* pred = f1 + 3 * n;
    double* f2 = pred + 3 * n;
    const double sg = std::sqrt(model.gamma_z);

    drift(model, s, f1);
    for (int i = 0; i < n; ++i) {
        double gx = -sg * s[3 * i + AY] * dw;
        double gy = sg * s[3 * i + AX] * dw;
        pred[3 * i + AX] = s[3 * i + AX] + f1[3 * i + AX] * dt + gx;
        pred[3 * i + AY] = s[3 * i + AY] + f1[3 * i + AY] * dt + gy;
        pred[3 * i + AZ] = s[3 * i + AZ] + f1[3 * i + AZ] * dt;
    }
    drift(model, pred, f2);
    for (int i = 0; i < n; ++i) {
        double gx = -0.5 * sg * (s[3 * i + AY] + pred[3 * i + AY]) * dw;
        double gy = 0.5 * sg * (s[3 * i + AX] + pred[3 * i + AX]) * dw;
        s[3 * i + AX] += 0.5 * (f1[3 * i + AX] + f2[3 * i + AX]) * dt + gx;
        s[3 * i + AY] += 0.5 * (f1[3 * i + AY] + f2[3 * i + AY]) * dt + gy;
        s[3 * i + AZ] += 0.5 * (f1[3 * i + AZ] + f2[3 * i + AZ]) * dt;
    }
}

namespace {

// Classical products of the collective variables; same-site contributions
// are kept classical so that drift-conserved collective quantities stay
// exactly conserved by the estimator.
CollectiveMoments trajectory_collective(const double* s, int n) {
    CollectiveMoments c;
    Eigen::Vector3d tot = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i)
        tot += Eigen::Vector3d(s[3 * i], s[3 * i + 1], s[3 * i + 2]);
    c.mean = 0.5 * tot;
    c.second = 0.25 * tot * tot.transpose();
    return c;
}

void accumulate_trajectory(const double* s, int n, size_t ti, BlockSums& b) {
    auto& f = b.first[ti];
    auto& fsq = b.firstsq[ti];
    auto& pr = b.pairs[ti];
    size_t p = 0;
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a) {
            double v = s[3 * i + a];
            f[i * 3 + a] += v;
            fsq[i * 3 + a] += v * v;
        }
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k)
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c)
                    pr[p++] += s[3 * i + a] * s[3 * k + c];
    CollectiveMoments cm = trajectory_collective(s, n);
    b.collective[ti].mean += cm.mean;
    b.collective[ti].second += cm.second;
}

}  // namespace

Result run_dtwa(const ModelSpec& model, const Schedule& sched, int m_traj,
                const RngPlan& plan, int workers) {
    model.validate();
    sched.validate();
    if (model.kind != ModelKind::PLXX && model.kind != ModelKind::PLTFI)
        throw std::invalid_argument("dtwa engine supports only PL-XX and PL-TFI");
    if (m_traj < 1) throw std::invalid_argument("dtwa: need at least one trajectory");
    if (workers < 1) workers = 1;

    const int n = model.couplings.n;
    const size_t n_times = sched.sample_times.size();
    const size_t n_pairs9 = static_cast<size_t>(n) * (n - 1) / 2 * 9;
    const double dt_max = max_step(model);
    const auto grid = build_grid(sched, dt_max);
    const int n_blocks = (m_traj + kBlockSize - 1) / kBlockSize;

    // Global accumulators in extended precision; folded in block order.
    std::vector<std::vector<long double>> g_first(n_times),
        g_firstsq(n_times), g_pairs(n_times);
    for (size_t ti = 0; ti < n_times; ++ti) {
        g_first[ti].assign(static_cast<size_t>(n) * 3, 0.0L);
        g_firstsq[ti].assign(static_cast<size_t>(n) * 3, 0.0L);
        g_pairs[ti].assign(n_pairs9, 0.0L);
    }
    std::vector<CollectiveMoments> g_coll(n_times);
    Result res;
    res.times = sched.sample_times;
    res.dt = dt_max;
    res.block_size = kBlockSize;
    res.block_collective.assign(n_times, std::vector<CollectiveMoments>(n_blocks));

    std::atomic<int> next_block{0};
    std::mutex fold_mutex;
    std::map<int, BlockSums> pending;
    int fold_index = 0;

    auto integrate_block = [&](int bi, BlockSums& sums) {
        const int t0 = bi * kBlockSize;
        const int t1 = std::min(m_traj, t0 + kBlockSize);
        sums.count = t1 - t0;
        sums.first.assign(n_times, std::vector<double>(static_cast<size_t>(n) * 3, 0.0));
        sums.firstsq.assign(n_times, std::vector<double>(static_cast<size_t>(n) * 3, 0.0));
        sums.pairs.assign(n_times, std::vector<double>(n_pairs9, 0.0));
        sums.collective.assign(n_times, CollectiveMoments{});
        std::vector<double> spins(static_cast<size_t>(n) * 3);
        std::vector<double> scratch;
        for (int traj = t0; traj < t1; ++traj) {
            RngStream rng(plan, static_cast<std::uint64_t>(traj));
            for (int i = 0; i < n; ++i) {
                std::uint64_t u = rng.next_u64();
                spins[3 * i + AX] = 1.0;
                spins[3 * i + AY] = (u & 1) ? 1.0 : -1.0;
                spins[3 * i + AZ] = (u & 2) ? 1.0 : -1.0;
            }
            for (size_t ti = 0; ti < n_times; ++ti) {
                const auto& seg = grid[ti];
                for (int k = 0; k < seg.substeps; ++k) {
                    double dw = model.gamma_z > 0.0
                                    ? std::sqrt(seg.h) * rng.next_gaussian()
                                    : 0.0;
                    heun_step(model, spins.data(), seg.h, dw, scratch);
                }
                accumulate_trajectory(spins.data(), n, ti, sums);
            }
        }
    };

    auto fold = [&](int bi, BlockSums&& sums) {
        std::unique_lock<std::mutex> lock(fold_mutex);
        pending.emplace(bi, std::move(sums));
        while (!pending.empty() && pending.begin()->first == fold_index) {
            BlockSums& b = pending.begin()->second;
            for (size_t ti = 0; ti < n_times; ++ti) {
                for (size_t q = 0; q < b.first[ti].size(); ++q) {
                    g_first[ti][q] += b.first[ti][q];
                    g_firstsq[ti][q] += b.firstsq[ti][q];
                }
                for (size_t q = 0; q < n_pairs9; ++q) g_pairs[ti][q] += b.pairs[ti][q];
                g_coll[ti].mean += b.collective[ti].mean;
                g_coll[ti].second += b.collective[ti].second;
                CollectiveMoments cm = b.collective[ti];
                cm.mean /= b.count;
                cm.second /= b.count;
                res.block_collective[ti][fold_index] = cm;
            }
            pending.erase(pending.begin());
            ++fold_index;
        }
    };

    auto worker_fn = [&]() {
        for (;;) {
            int bi = next_block.fetch_add(1);
            if (bi >= n_blocks) return;
            BlockSums sums;
            integrate_block(bi, sums);
            fold(bi, std::move(sums));
        }
    };

    if (workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
        for (auto& th : pool) th.join();
    }

    const double inv_m = 1.0 / m_traj;
    for (size_t ti = 0; ti < n_times; ++ti) {
        MomentTable t(n);
        t.set_same_site_pauli();
        Eigen::MatrixXd se(n, 3);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < 3; ++a) {
                double mean = static_cast<double>(g_first[ti][i * 3 + a]) * inv_m;
                double msq = static_cast<double>(g_firstsq[ti][i * 3 + a]) * inv_m;
                t.first(i, a) = mean;
                se(i, a) = std::sqrt(std::max(0.0, msq - mean * mean) * inv_m);
            }
        size_t p = 0;
        for (int i = 0; i < n; ++i)
            for (int k = i + 1; k < n; ++k)
                for (int a = 0; a < 3; ++a)
                    for (int c = 0; c < 3; ++c) {
                        double v = static_cast<double>(g_pairs[ti][p++]) * inv_m;
                        t.second(i, a, k, c) = v;
                        t.second(k, c, i, a) = v;
                    }
        t.first_stderr = se;
        res.tables.push_back(std::move(t));
        CollectiveMoments cm = g_coll[ti];
        cm.mean *= inv_m;
        cm.second *= inv_m;
        cm.second = (0.5 * (cm.second + cm.second.transpose())).eval();
        res.collective.push_back(cm);
    }
    return res;
}

}  // namespace dtwa
}  // namespace spinsim
