#pragma once

// Random number plumbing. Every stream in the project is a std::mt19937_64
// seeded from one user-facing 64-bit seed through splitmix64:
//
//   chain c            -> splitmix64(seed + c)
//   named stream s     -> splitmix64(seed ^ splitmix64(s))
//
// so chains and generators never share a stream.

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace bajd {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t chain_seed(std::uint64_t seed, std::uint64_t chain) {
  return splitmix64(seed + chain);
}

enum class Stream : std::uint64_t {
  kPlanted = 1,
  kMixing = 2,
  kNoise = 3,
  kCspaSources = 4,
  kBinghamTarget = 5,
  kSampler = 6,
};

constexpr std::uint64_t stream_seed(std::uint64_t seed, Stream s) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(s)));
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double std_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

/// Gamma(shape, scale) draw.
inline double gamma_draw(double shape, double scale, Rng& rng) {
  return std::gamma_distribution<double>(shape, scale)(rng);
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  // explicit loop keeps the draw order fixed (column-major)
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = std_normal(rng);
  return m;
}

}  // namespace bajd
