#pragma once

#include <cstdint>

namespace l2lb {

/// Deterministic 64-bit generator (splitmix-seeded xoshiro256**).
/// Distributions are implemented inline so output is identical across
/// standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // rejection against the largest multiple of n
    const std::uint64_t lim = n * ((~0ULL) / n);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= lim);
    return v % n;
  }

  /// Rademacher sign.
  int sign() { return (next() >> 63) ? 1 : -1; }

  /// Bernoulli(p) in {0,1}.
  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  /// Derives an independent stream for worker `k`.
  Rng fork(std::uint64_t k) const {
    Rng r(s_[0] ^ (0x6a09e667f3bcc909ULL + k * 0x2545F4914F6CDD1DULL));
    r.s_[1] ^= s_[1];
    r.s_[2] ^= s_[2] + k;
    r.s_[3] ^= s_[3];
    return r;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace l2lb
