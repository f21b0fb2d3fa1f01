#pragma once

#include <cstdint>
#include <vector>

namespace wb {

// Deterministic 64-bit generator (splitmix64).  We avoid std:: distributions
// because their output is not pinned across library implementations; byte
// identical reruns for a fixed seed are part of the tool's contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform value in [0, bound); bound > 0.  Rejection sampling keeps the
  // distribution exact and the stream reproducible.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  int range(int lo, int hi) {  // inclusive ends
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool chance(int num, int den) { return below(static_cast<std::uint64_t>(den)) < static_cast<std::uint64_t>(num); }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(xs.size())];
  }

  Rng fork() { return Rng(next() ^ 0xd1342543de82ef95ULL); }

 private:
  std::uint64_t state_;
};

}  // namespace wb
