#pragma once

#include <cstdint>
#include <vector>

#include "holobar/rational.hpp"

namespace holobar {

/* splitmix64: tiny, seedable, identical across platforms.  All randomized
 * sweeps in tests and scenarios draw from this so reports are reproducible. */
struct Rng {
  std::uint64_t s;

  explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : s(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  /* uniform integer in [0, m) */
  std::uint64_t below(std::uint64_t m) { return next() % m; }
  int range(int lo, int hi) { return lo + static_cast<int>(below(hi - lo + 1)); }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /* small rational with numerator in [-max, max] and denominator in [1, dmax] */
  rat small_rat(int max = 3, int dmax = 2) {
    long num = range(-max, max);
    long den = range(1, dmax);
    return rat_of(num, den);
  }
};

}  // namespace holobar
