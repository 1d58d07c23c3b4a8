#ifndef AWSGD_COMMON_HPP_
#define AWSGD_COMMON_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace awsgd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

// A sampled (row, column) cell of a matrix-shaped space.
struct Cell {
    Index row = 0;
    Index col = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

// log(1 + exp(x)) without overflow for large |x|.
inline double log1pExp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream for (seed, streamId). Streams are keyed by value, not
// by position in any list, so adding runs never perturbs existing ones.
inline Rng makeRng(std::uint64_t seed, std::uint64_t streamId = 0) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(streamId + 0x51ed2701ULL)));
}

// Canonical uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline Index uniformIndex(Rng& rng, Index n) {
    const auto k = static_cast<Index>(uniform01(rng) * static_cast<double>(n));
    return k >= n ? n - 1 : k;
}

}  // namespace awsgd

#endif  // AWSGD_COMMON_HPP_
