#ifndef SPINSIM_RNG_HPP
#define SPINSIM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace spinsim {

/// Counter-based per-trajectory random streams. Stream state is a pure
/// function of (master_seed, trajectory index, draw counter), so results do
/// not depend on how trajectories are scheduled across workers.
struct RngPlan {
    std::uint64_t master_seed = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// One stream = splitmix64 sequence keyed by (master_seed, trajectory).
class RngStream {
  public:
    RngStream(const RngPlan& plan, std::uint64_t trajectory) {
        std::uint64_t k = detail::splitmix64(plan.master_seed ^ (trajectory * 0xD1342543DE82EF95ULL + 1));
        state_ = detail::splitmix64(k ^ 0x2545F4914F6CDD1DULL);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1).
    double next_uniform() {
        std::uint64_t u = next_u64();
        return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller, draws consumed in a fixed order.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace spinsim

#endif
