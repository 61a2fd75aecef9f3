#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pdl {

// splitmix64 step; used to derive independent per-job seeds from a base seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; all value transforms are explicit here,
// so every draw reproduces bit-for-bit across platforms and library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inverse-CDF draw from Beta(1, b): F(r) = 1 - (1 - r)^b on [0, 1].
  double beta1(double b) { return 1.0 - std::pow(1.0 - uniform01(), 1.0 / b); }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    constexpr double kTwoPi = 6.28318530717958647692528676655900577;
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n). Modulo fold; the bias is ~n/2^64 and the
  // reduction is part of the documented split algorithm.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace pdl
