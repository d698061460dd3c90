#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gcalc {

// Philox 4x32-10 counter-based generator (Salmon et al., SC 2011).
// A block is a pure function of (key, counter), so sample i of stream s is
// identical no matter how work is split across threads.
namespace philox {

inline constexpr std::uint32_t kM0 = 0xD2511F53u;
inline constexpr std::uint32_t kM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

inline std::array<std::uint32_t, 4> block(std::uint64_t key, std::array<std::uint32_t, 4> ctr) {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int r = 0; r < 10; ++r) {
        round_once(ctr, k0, k1);
        k0 += kW0;
        k1 += kW1;
    }
    return ctr;
}

}  // namespace philox

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Deterministic stateless random source keyed by (seed, purpose tag).
/// Indices (a, b) address independent draws; callers use (path, step) or
/// (stream, sample) conventions as they see fit.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t tag = 0)
        : key_(splitmix64(seed ^ splitmix64(tag))) {}

    /// Two independent standard normals for index (a, b) via Box-Muller.
    void normal_pair(std::uint64_t a, std::uint64_t b, double& z0, double& z1) const {
        const auto c = philox::block(key_, counter(a, b));
        const std::uint64_t x = (static_cast<std::uint64_t>(c[0]) << 32) | c[1];
        const std::uint64_t y = (static_cast<std::uint64_t>(c[2]) << 32) | c[3];
        const double u1 = (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(y >> 11) * 0x1.0p-53;          // [0, 1)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        z0 = r * std::cos(phi);
        z1 = r * std::sin(phi);
    }

    /// Standard normals for components 0..n-1 of logical index (a, b).
    void normals(std::uint64_t a, std::uint64_t b, double* out, int n) const {
        for (int j = 0; 2 * j < n; ++j) {
            double z0, z1;
            normal_pair(a, (b << 8) | static_cast<std::uint64_t>(j), z0, z1);
            out[2 * j] = z0;
            if (2 * j + 1 < n) out[2 * j + 1] = z1;
        }
    }

    /// Uniform draw in [0, 1) for index (a, b).
    double uniform(std::uint64_t a, std::uint64_t b) const {
        const auto c = philox::block(key_, counter(a, b));
        const std::uint64_t x = (static_cast<std::uint64_t>(c[0]) << 32) | c[1];
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    }

    /// Uniform draw in [lo, hi).
    double uniform(std::uint64_t a, std::uint64_t b, double lo, double hi) const {
        return lo + (hi - lo) * uniform(a, b);
    }

private:
    static std::array<std::uint32_t, 4> counter(std::uint64_t a, std::uint64_t b) {
        return {static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32)};
    }

    std::uint64_t key_;
};

// Purpose tags keeping logically distinct streams disjoint under one user seed.
namespace rng_tag {
inline constexpr std::uint64_t kSimulate = 1;
inline constexpr std::uint64_t kControlSample = 2;
inline constexpr std::uint64_t kOptimizer = 3;
inline constexpr std::uint64_t kTest = 99;
}  // namespace rng_tag

}  // namespace gcalc
