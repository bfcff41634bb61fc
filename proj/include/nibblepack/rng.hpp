#pragma once

#include <cstdint>

namespace nibblepack {

// Every random decision in the process is a pure function of
// (seed, step, stream, index). Sampling order and thread count therefore
// cannot change outcomes, and any single decision can be replayed in
// isolation.
enum class Stream : uint64_t {
  Gamma = 1,  // nibble inclusion draws
  Stab = 2,   // stabilization inclusion draws
  Host = 3,   // random host generation
  Audit = 4,  // sampled audits, probes, witness sets
};

namespace rng {

inline constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline uint64_t mix(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline uint64_t key(uint64_t seed, uint64_t step, Stream stream, uint64_t index) {
  uint64_t h = mix(seed + kGolden);
  h = mix(h ^ (step + kGolden));
  h = mix(h ^ (static_cast<uint64_t>(stream) + kGolden));
  h = mix(h ^ (index + kGolden));
  return h;
}

// Uniform in [0, 1) with 53 random bits.
inline double u01(uint64_t hash) {
  return static_cast<double>(hash >> 11) * 0x1.0p-53;
}

inline double draw(uint64_t seed, uint64_t step, Stream stream, uint64_t index) {
  return u01(key(seed, step, stream, index));
}

// Derives an independent child seed, e.g. one per trial or per probe.
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
  return key(seed, 0, Stream::Audit, index);
}

// Sequential stream for shuffles and other inherently ordered sampling.
class Sequence {
 public:
  explicit Sequence(uint64_t seed) : state_(seed) {}
  Sequence(uint64_t seed, uint64_t step, Stream stream, uint64_t index)
      : state_(key(seed, step, stream, index)) {}

  uint64_t next() {
    state_ += kGolden;
    return mix(state_);
  }

  double next_u01() { return u01(next()); }

  // Unbiased integer in [0, bound), bound >= 1.
  uint64_t next_below(uint64_t bound) {
    uint64_t m = bound - 1;
    m |= m >> 1;
    m |= m >> 2;
    m |= m >> 4;
    m |= m >> 8;
    m |= m >> 16;
    m |= m >> 32;
    for (;;) {
      uint64_t v = next() & m;
      if (v < bound) return v;
    }
  }

 private:
  uint64_t state_;
};

}  // namespace rng
}  // namespace nibblepack
