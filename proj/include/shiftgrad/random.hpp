#pragma once

#include <cstdint>
#include <random>

#include "shiftgrad/simulator.hpp"

namespace shiftgrad {

/// SplitMix64 finalizer. Used to derive independent stream seeds from counters.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for stream `counter` under `seed` within `domain` (e.g. qubit count).
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t domain,
                                    std::uint64_t counter) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ domain) ^ counter);
}

/// Uniform in [0,1) from the top 53 bits; independent of <random> distributions.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Haar-distributed d x d unitary (row-major) via QR of a complex Ginibre
/// matrix with the R-diagonal phases divided out.
std::vector<Complex> haar_unitary(int dim, std::mt19937_64& rng);

Matrix4 haar_unitary4(std::mt19937_64& rng);

}  // namespace shiftgrad
