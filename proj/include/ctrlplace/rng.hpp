#ifndef CTRLPLACE_RNG_HPP
#define CTRLPLACE_RNG_HPP

#include <cstdint>

namespace ctrlplace {

// Deterministic, platform-independent random primitives. std::mt19937_64 is
// portable but the standard distributions are not, so doubles are built
// directly from the raw 64-bit stream.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for sub-stream `n` of `master`. Used for trial seeds (n = repeat
// index) and for separating failure-sampling from solver randomness.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n) {
  return splitmix64(master + (n + 1) * 0x9e3779b97f4a7c15ULL);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, hi].
  double next_in(double hi) { return hi * next_double(); }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection-free modulo is biased for huge n; n here is always small.
    return next_u64() % n;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ctrlplace

#endif  // CTRLPLACE_RNG_HPP
