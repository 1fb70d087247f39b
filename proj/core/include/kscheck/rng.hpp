#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace kscheck {

// All randomness in the project flows through this wrapper around
// std::mt19937_64, whose output sequence is pinned by the C++ standard.
// Doubles come from the 53-bit shift construction and unit vectors from
// cube rejection, never from std::*_distribution (implementation-defined),
// so identical seeds give identical logs everywhere.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}, unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool next_bit() { return (engine_() >> 63) != 0; }

  // Uniform direction on the sphere by rejection from the cube; uses only
  // arithmetic and sqrt, both exactly rounded under IEEE 754.
  std::array<double, 3> next_unit_vector() {
    for (;;) {
      double x = 2.0 * next_unit() - 1.0;
      double y = 2.0 * next_unit() - 1.0;
      double z = 2.0 * next_unit() - 1.0;
      double n2 = x * x + y * y + z * z;
      if (n2 > 1e-4 && n2 <= 1.0) {
        double n = std::sqrt(n2);
        return {x / n, y / n, z / n};
      }
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed (splitmix64 step), so parallel and
// serial per-trial runs agree.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace kscheck
