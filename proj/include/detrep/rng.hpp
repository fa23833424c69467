#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace detrep {

/// Seeded generator with a fully specified output sequence.
///
/// The engine is std::mt19937_64, whose output is fixed by the standard. The
/// standard distributions are implementation-defined, so the conversions to
/// doubles are done here: uniform() takes the top 53 bits, normal() is
/// Box-Muller on two uniforms. The same seed gives the same stream on every
/// conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  double angle() { return uniform(0.0, 2.0 * std::numbers::pi); }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent per-sample seeds from a base
/// seed so serial and parallel runs see identical streams.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detrep
