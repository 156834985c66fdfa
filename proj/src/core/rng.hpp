#pragma once

// xoshiro256++ with splitmix64 seeding. <random>'s distributions are
// implementation-defined, so uniform/normal draws are built here from raw
// bits to keep (seed, config) -> output stable across toolchains.

#include <cmath>
#include <cstdint>

#include "detmath.hpp"

namespace lvq {

inline uint64_t splitmix64(uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derive an independent stream seed from a base seed and a purpose tag, so
// e.g. noise draws and target sampling never share a sequence.
inline uint64_t derive_seed(uint64_t base, uint64_t purpose) {
  uint64_t s = base;
  (void)splitmix64(s);
  s ^= 0xA5A5A5A5DEADBEEFull * (purpose + 1);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
    has_spare_ = false;
    spare_ = 0.0;
  }

  uint64_t next_u64() {
    auto rotl = [](uint64_t x, int k) {
      return (x << k) | (x >> (64 - k));
    };
    uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53 significant bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [-1/2, 1/2), the dither/noise convention used throughout.
  double next_sym_unit() { return next_unit() - 0.5; }

  // Unbiased integer in [0, bound) by rejection.
  uint64_t next_below(uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via Marsaglia polar; consumes a variable number of
  // uniforms but is fully deterministic for a fixed stream.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    for (;;) {
      double u = 2.0 * next_unit() - 1.0;
      double v = 2.0 * next_unit() - 1.0;
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        double m = det::log(s);
        m = -2.0 * m / s;
        m = std::sqrt(m);  // sqrt is correctly rounded per IEEE-754

        spare_ = v * m;
        has_spare_ = true;
        return u * m;
      }
    }
  }

 private:
  uint64_t state_[4];
  bool has_spare_;
  double spare_;
};

}  // namespace lvq
