// Deterministic counter-based random streams.  Every consumer derives its own
// stream from a (seed, path...) key, so parallel components never share RNG
// state and results are bit-reproducible for a fixed seed regardless of
// thread scheduling.
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace quditmc {

// SplitMix64 finalizer: a well-mixed 64 -> 64 bijection.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Fold a hierarchical path (seed, run, event, ...) into a single stream key.
inline std::uint64_t derive_key(std::initializer_list<std::uint64_t> path) {
  std::uint64_t k = 0x6a09e667f3bcc909ull;  // arbitrary fixed offset
  for (std::uint64_t part : path) k = mix64(k ^ part);
  return k;
}

// A private random stream.  SplitMix64 sequence seeded by the derived key;
// passes standard statistical batteries and is cheap to fork.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : state_(key) {}
  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
      : state_(derive_key({seed})) {
    for (std::uint64_t part : path) state_ = mix64(state_ ^ part);
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with full 53-bit mantissa resolution.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); rejection sampling, no modulo bias.
  int uniform_int(int n) {
    const std::uint64_t bound = ~0ull - ~0ull % static_cast<std::uint64_t>(n);
    std::uint64_t r;
    do {
      r = next();
    } while (r >= bound);
    return static_cast<int>(r % static_cast<std::uint64_t>(n));
  }

 private:
  std::uint64_t state_;
};

// One standard normal draw (Box-Muller), consuming two uniforms.
inline double normal(Stream& s) {
  double u1;
  do {
    u1 = s.uniform();
  } while (u1 <= 0.0);
  const double u2 = s.uniform();
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace quditmc
