#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace decdens {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a path of
/// integers (study tag, sample size, replicate index, ...). Counter-based:
/// the result depends only on the inputs, never on draw order elsewhere.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t w : path) s = splitmix64(s ^ splitmix64(w));
  return s;
}

/// Seeded RNG stream with the handful of scalar draws the samplers need.
/// Hand-rolled transforms keep draw sequences stable across standard
/// library versions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  /// Standard normal via Box-Muller (two uniforms per draw).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Standard exponential by inverse CDF.
  double exponential() { return -std::log(uniform01()); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace decdens
