#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace fmp {

/// Fixed generators so benchmark output is reproducible across standard
/// libraries: mt19937_64 seeded through splitmix64, uniforms from the top
/// 53 bits, normals by the Marsaglia polar method.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Generator for trial `index` of a run seeded with `master`.
inline std::mt19937_64 trial_rng(std::uint64_t master, std::uint64_t index)
{
    return std::mt19937_64(splitmix64(master ^ splitmix64(index)));
}

/// Uniform on [0, 1).
inline double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal; each call consumes one accepted polar pair and keeps
/// the first coordinate.
inline double standard_normal(std::mt19937_64& rng)
{
    for (;;) {
        const double u = 2.0 * uniform01(rng) - 1.0;
        const double v = 2.0 * uniform01(rng) - 1.0;
        const double q = u * u + v * v;
        if (q > 0.0 && q < 1.0) return u * std::sqrt(-2.0 * std::log(q) / q);
    }
}

/// Standard bivariate normal pair with correlation c.
inline std::pair<double, double> correlated_pair(std::mt19937_64& rng, double c)
{
    const double z1 = standard_normal(rng);
    const double z2 = standard_normal(rng);
    return {z1, c * z1 + std::sqrt(std::max(0.0, 1.0 - c * c)) * z2};
}

} // namespace fmp
