#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "shapegeo/common.hpp"

namespace shapegeo {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derive an independent substream seed from (seed, a, b).  Replicate loops
// seed one engine per index so serial and concurrent execution agree
// bit-for-bit.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s ^= a * 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  s ^= b * 0xc2b2ae3d27d4eb4fULL;
  h ^= splitmix64(s);
  return h;
}

// Uniform/normal deviates built from raw mt19937_64 output.  The std
// distribution objects are implementation-defined, which would break the
// cross-platform bit-reproducibility contract, so the mappings are spelled
// out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {  // Box-Muller, cosine branch
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  int uniform_int(int n) {  // {0, ..., n-1}, n small; modulo bias negligible
    return static_cast<int>(eng_() % static_cast<std::uint64_t>(n));
  }

  Eigen::VectorXd gaussian(Eigen::Index n, double sigma = 1.0) {
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = sigma * normal();
    return g;
  }

  Cvec cgaussian(Eigen::Index n, double sigma = 1.0) {
    Cvec g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = sigma * normal();
      const double im = sigma * normal();
      g[i] = {re, im};
    }
    return g;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace shapegeo
