#pragma once

#include <cstdint>

namespace blocksdp {

// Counter-based keyed RNG. Streams are pure functions of their key, so a
// draw for (seed, i, j) is independent of call order; this is what makes
// samplers order-independent and replications reproducible under threading.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed, std::uint64_t k1 = 0, std::uint64_t k2 = 0,
                    std::uint64_t k3 = 0) {
    state_ = mix(seed + 0x632be59bd9b4e019ULL);
    state_ = mix(state_ ^ k1);
    state_ = mix(state_ ^ k2);
    state_ = mix(state_ ^ k3);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection-free modulo is biased for huge n; all our n are tiny.
    return next_u64() % n;
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t state_;
};

}  // namespace blocksdp
