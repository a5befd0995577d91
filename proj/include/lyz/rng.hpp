#pragma once

#include <cstdint>
#include <random>

namespace lyz::rng {

// Reproducibility contract, shared by every stochastic routine in the
// library: a substream is derived per (seed, index) with splitmix64 and feeds
// std::mt19937_64, whose output sequence the C++ standard pins exactly.
// Uniforms map the top 53 bits to (0, 1]; normals use the Box-Muller cosine
// branch. Identical seeds give bit-identical streams on any conforming
// platform.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ ((index + 1) * 0x9E3779B97F4A7C15ull));
}

inline double uniform_01(std::mt19937_64& g) {
    return static_cast<double>((g() >> 11) + 1) * 0x1p-53;  // (0, 1]
}

inline double standard_normal(std::mt19937_64& g) {
    const double u1 = uniform_01(g);
    const double u2 = uniform_01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace lyz::rng
