#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace specbeam {

/// Mixes a 64-bit value into a well-distributed seed (splitmix64 finalizer).
/// This is the documented seed-splitting rule everywhere the harness derives
/// per-trial generators: child_seed = splitmix64(seed ^ GOLDEN * (tag + 1)).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
/// is pinned by the standard) and hand-rolls all variate generation so that
/// results are bit-identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 bits of randomness.
  double next_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Plain modulo: n is tiny relative to 2^64 in
  /// every caller, so the bias is far below any tested tolerance.
  std::uint64_t next_below(std::uint64_t n) { return gen_() % n; }

  /// Derives an independent child generator from this generator's seed.
  Rng child(std::uint64_t tag) const {
    return Rng(splitmix64(seed_ ^ (0x9e3779b97f4a7c15ull * (tag + 1))));
  }

  /// Standard normal via Box-Muller (portable, unlike std::normal_distribution).
  double next_gaussian() {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang, extended to shape < 1 by boosting.
  double next_gamma(double shape) {
    if (shape < 1.0) {
      double u = next_double();
      if (u <= 0.0) u = 0x1.0p-53;
      return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = next_gaussian();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = next_double();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace specbeam
