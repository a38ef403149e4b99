#pragma once

// Deterministic random streams.  A master seed plus a stream index yields an
// independent substream via splitmix64 mixing; uniforms are built directly
// from mt19937_64 output bits so results are identical across platforms
// (std::uniform_real_distribution is implementation-defined and avoided).

#include <cstdint>
#include <random>

#include "ordsieve/math/normal.hpp"

namespace ordsieve {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream `id` derived from `master`; documented counter scheme used by the
// CLI: replication j owns ids {3j, 3j+1, 3j+2} for data / panel / optimizer.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t id) {
    return splitmix64(splitmix64(master) + 0x9E3779B97F4A7C15ULL * (id + 1));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // strictly inside (0,1): ((bits >> 11) + 0.5) * 2^-53
    double uniform01() {
        const std::uint64_t bits = eng_();
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_quantile(uniform01()); }

    std::uint64_t bits() { return eng_(); }

  private:
    std::mt19937_64 eng_;
};

}  // namespace ordsieve
