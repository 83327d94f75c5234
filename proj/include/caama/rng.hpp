#pragma once

#include <cmath>
#include <cstdint>

namespace caama {

// Splittable counter-style PRNG built on the SplitMix64 step. Substreams are
// derived by hashing (seed, index) with two distinct finalizers, so
// per-profile draws are reproducible no matter how sampling is parallelized
// or batched.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(mix_a(seed)) {}

  static Rng substream(uint64_t seed, uint64_t index) {
    Rng r(0);
    r.state_ = mix_b(mix_a(seed) ^ mix_a(index * 0xd1342543de82ef95ULL + 1));
    return r;
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix_a(state_);
  }

  // uniform on [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; the log argument is kept away from zero.
  double normal() {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Marsaglia-Tsang, with the boost trick for alpha < 1.
  double gamma(double alpha) {
    if (alpha < 1.0) {
      const double u = uniform01();
      return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  static uint64_t mix_a(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static uint64_t mix_b(uint64_t z) {
    z = (z ^ (z >> 31)) * 0x7fb5d329728ea185ULL;
    z = (z ^ (z >> 27)) * 0x81dadef4bc2dd44dULL;
    return z ^ (z >> 33);
  }

  uint64_t state_;
};

}  // namespace caama
