#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace framepool {

// Seeded random source with hand-rolled transforms. std::mt19937_64 output
// is pinned by the standard, but the std distributions on top of it are
// implementation-defined, so uniform and gaussian draws are spelled out
// here to keep identical seeds producing identical streams everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on (0, 1): 53 mantissa bits, offset half a step so 0 and 1
  // are never returned (log() in the gaussian below stays finite).
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi] via scaled uniform01 (inclusive bounds).
  int uniform_int(int lo, int hi) {
    const double span = static_cast<double>(hi) - static_cast<double>(lo) + 1.0;
    int v = lo + static_cast<int>(uniform01() * span);
    return v > hi ? hi : v;
  }

  // Standard normal via Box-Muller; draws two uniforms per value and
  // discards the paired sample so the stream stays position-independent.
  double gaussian() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace framepool
