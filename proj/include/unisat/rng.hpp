#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

#include "unisat/types.hpp"

namespace unisat {

// Deterministic xoshiro256** generator. The standard <random> engines are
// portable but the distributions are not; every sampling routine here is
// spelled out so that (seed -> sample stream) is bit-identical across
// platforms and compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // Modulo bias is irrelevant for simulation purposes; determinism is what matters.
  std::uint64_t uniform_int(std::uint64_t n) { return n ? next_u64() % n : 0; }

  // Box-Muller, one draw per call (two uniforms consumed, no cached spare).
  double normal() {
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Draws from N(mean, L L^T) given the Cholesky factor L.
  template <int N>
  Eigen::Matrix<double, N, 1> normal_vec(const Eigen::Matrix<double, N, 1>& mean,
                                         const Eigen::Matrix<double, N, N>& chol_lower) {
    Eigen::Matrix<double, N, 1> z;
    for (int i = 0; i < N; ++i) z(i) = normal();
    return mean + chol_lower * z;
  }

  // Knuth's product method; fine for the small rates used here.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  // Inverse-cdf draw from an (unnormalized is fine) discrete pmf.
  int categorical(const std::vector<double>& pmf) {
    double total = 0.0;
    for (double p : pmf) total += p;
    double u = uniform() * total;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      u -= pmf[i];
      if (u <= 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(pmf.size()) - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_int(i)]);
    }
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Named stream derivation: decouples per-purpose randomness so that toggling
// one consumer does not perturb the others.
inline Rng derive_stream(std::uint64_t base_seed, std::string_view stream_name) {
  std::uint64_t x = base_seed ^ fnv1a64(stream_name);
  Rng::splitmix64(x);
  return Rng(x);
}

inline Rng derive_stream(std::uint64_t base_seed, std::uint64_t episode_index,
                         std::string_view stream_name) {
  std::uint64_t x = base_seed ^ (0x9e3779b97f4a7c15ull * (episode_index + 1));
  x = Rng::splitmix64(x) ^ fnv1a64(stream_name);
  return Rng(x);
}

}  // namespace unisat
